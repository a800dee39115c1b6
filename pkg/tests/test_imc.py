import math

import numpy as np
import pytest

from imcnas.imc import (DEFAULT_HARDWARE, HardwareConfig, NS_PER_MS, PJ_PER_MJ,
                        energy_layer, estimate_network, latency_layer, map_layer)
from imcnas.netir import HeadSpec, LayerIR, LayerKind, NETWORK_INPUT, NetworkIR, expand
from imcnas.space import (ArchGenome, BlockSpec, BlockType, DEFAULT_SPACE,
                          SearchSpace, decode, sample_valid)

from event_oracle import simulate_layer, simulate_network

HEAD = HeadSpec()


def conv_layer(cin, cout, h, w, kh=3, kw=3):
    pad = (kh - 1) // 2
    return LayerIR(LayerKind.CONV, (cin, h, w), (cout, h, w),
                   params=cin * kh * kw * cout + cout,
                   macs=cout * h * w * cin * kh * kw,
                   inputs=(NETWORK_INPUT,), kernel=(kh, kw), padding=pad)


def fc_layer(n_in, n_out):
    return LayerIR(LayerKind.FC, n_in, n_out, params=n_in * n_out + n_out,
                   macs=n_in * n_out, inputs=(NETWORK_INPUT,))


class TestMapping:
    def test_partitioned_conv(self):
        m = map_layer(conv_layer(64, 128, 16, 16), DEFAULT_HARDWARE)
        assert (m.rows_needed, m.cols_needed) == (576, 512)
        assert (m.row_parts, m.col_parts, m.xbars) == (3, 2, 6)
        assert m.windows == 256

    def test_minimal_conv(self):
        m = map_layer(conv_layer(1, 1, 4, 4, 1, 1), DEFAULT_HARDWARE)
        assert m.xbars == 1

    def test_fc(self):
        m = map_layer(fc_layer(1024, 10), DEFAULT_HARDWARE)
        assert (m.rows_needed, m.row_parts) == (1024, 4)
        assert (m.cols_needed, m.col_parts) == (40, 1)
        assert m.xbars == 4

    def test_non_matrix_rejected(self):
        relu = LayerIR(LayerKind.RELU, (1, 4, 4), (1, 4, 4), inputs=(NETWORK_INPUT,))
        with pytest.raises(ValueError):
            map_layer(relu, DEFAULT_HARDWARE)


class TestLatency:
    def test_small_conv_per_window(self):
        layer = conv_layer(1, 16, 28, 28)
        m = map_layer(layer, DEFAULT_HARDWARE)
        # 8 cycles * (1 + 10 + ceil(64/8)*1) = 152 ns per window, 784 windows
        assert latency_layer(layer, m, DEFAULT_HARDWARE) == pytest.approx(119_168.0)

    def test_single_window(self):
        layer = conv_layer(1, 16, 1, 1)
        m = map_layer(layer, DEFAULT_HARDWARE)
        assert latency_layer(layer, m, DEFAULT_HARDWARE) == pytest.approx(152.0)

    def test_doubling_cout_doubles_adc_term(self):
        layer = conv_layer(1, 32, 28, 28)
        m = map_layer(layer, DEFAULT_HARDWARE)
        per_window = latency_layer(layer, m, DEFAULT_HARDWARE) / m.windows
        assert per_window == pytest.approx(8 * (1 + 10 + 16))


class TestEnergy:
    def test_small_conv_core_energy(self):
        layer = conv_layer(1, 16, 28, 28)
        m = map_layer(layer, DEFAULT_HARDWARE)
        movement = (1 * 28 * 28 + 16 * 28 * 28) * 1 * (1.0 + 2.0 * 1)
        total = energy_layer(layer, m, DEFAULT_HARDWARE)
        assert total - movement == pytest.approx(1_011_673.6, rel=1e-12)

    def test_residual_add(self):
        add = LayerIR(LayerKind.RESIDUAL_ADD, (16, 32, 32), (16, 32, 32),
                      inputs=(NETWORK_INPUT, NETWORK_INPUT))
        assert energy_layer(add, None, DEFAULT_HARDWARE) == pytest.approx(270_336.0)

    def test_empty_network(self):
        report = estimate_network(NetworkIR((), (), (1, 1, 1)), DEFAULT_HARDWARE)
        assert report.total_energy_pj == 0.0
        assert report.total_latency_ns == 0.0


class TestEstimateNetwork:
    def test_single_conv_totals(self):
        ir = NetworkIR((conv_layer(1, 16, 28, 28),), (), (1, 28, 28))
        report = estimate_network(ir, DEFAULT_HARDWARE)
        assert report.total_latency_ns == pytest.approx(119_168.0)
        assert report.latency_ms == pytest.approx(0.119168e-3 * 1000)  # 119.168 us

    def test_unit_conversion_exact(self):
        ir = expand(decode("VGG/32,RES/64,MVGG/16"), (3, 32, 32), HEAD)
        report = estimate_network(ir)
        assert report.latency_ms == report.total_latency_ns / NS_PER_MS
        assert report.energy_mj == report.total_energy_pj / PJ_PER_MJ
        assert report.total_latency_ns == sum(l.latency_ns for l in report.per_layer)
        assert report.total_energy_pj == pytest.approx(
            sum(l.energy_pj for l in report.per_layer), rel=1e-12)

    def test_res_swap_raises_energy(self):
        base = decode("MVGG/32,MVGG/32,VGG/64")
        swapped = decode("RES/32,MVGG/32,VGG/64")
        hw = DEFAULT_HARDWARE
        e_base = estimate_network(expand(base, (3, 32, 32), HEAD), hw).energy_mj
        e_swap = estimate_network(expand(swapped, (3, 32, 32), HEAD), hw).energy_mj
        assert e_swap > e_base


class TestOracleAgreement:
    def test_example_layers(self):
        hw = DEFAULT_HARDWARE
        for layer in [conv_layer(1, 16, 28, 28), conv_layer(64, 128, 6, 6),
                      conv_layer(3, 16, 9, 7, 1, 1), fc_layer(1024, 10),
                      fc_layer(10, 10)]:
            m = map_layer(layer, hw)
            lat, en = simulate_layer(layer, hw)
            assert lat == pytest.approx(latency_layer(layer, m, hw), rel=1e-9)
            assert en == pytest.approx(energy_layer(layer, m, hw), rel=1e-9)

    def test_pool_and_add_layers(self):
        hw = DEFAULT_HARDWARE
        pool = LayerIR(LayerKind.MAXPOOL, (8, 10, 10), (8, 5, 5),
                       inputs=(NETWORK_INPUT,), kernel=(2, 2), stride=2)
        add = LayerIR(LayerKind.RESIDUAL_ADD, (8, 5, 5), (8, 5, 5),
                      inputs=(NETWORK_INPUT, NETWORK_INPUT))
        for layer in (pool, add):
            lat, en = simulate_layer(layer, hw)
            assert lat == pytest.approx(latency_layer(layer, None, hw), rel=1e-9)
            assert en == pytest.approx(energy_layer(layer, None, hw), rel=1e-9)

    def test_duplication_factor(self):
        hw = HardwareConfig(xbar_duplication=4)
        layer = conv_layer(2, 8, 10, 10)
        m = map_layer(layer, hw)
        lat, en = simulate_layer(layer, hw)
        assert lat == pytest.approx(latency_layer(layer, m, hw), rel=1e-9)
        assert en == pytest.approx(energy_layer(layer, m, hw), rel=1e-9)
        # energy unchanged by duplication, latency divided into ceil(w/4) passes
        assert en == pytest.approx(energy_layer(layer, map_layer(layer, DEFAULT_HARDWARE),
                                                DEFAULT_HARDWARE), rel=1e-9)

    def test_random_network(self):
        g = sample_valid(DEFAULT_SPACE, (3, 16, 16), np.random.default_rng(1))
        ir = expand(g, (3, 16, 16), HEAD)
        report = estimate_network(ir)
        lat, en = simulate_network(ir, DEFAULT_HARDWARE)
        assert lat == pytest.approx(report.total_latency_ns, rel=1e-9)
        assert en == pytest.approx(report.total_energy_pj, rel=1e-9)


class TestTrendProperties:
    def test_kernel_monotonicity(self):
        rng = np.random.default_rng(2)
        hw = DEFAULT_HARDWARE
        for _ in range(20):
            g = sample_valid(DEFAULT_SPACE, (3, 16, 16), rng)
            i = int(rng.integers(g.depth))
            b = g.blocks[i]
            larger = [k for k in DEFAULT_SPACE.allowed_kernels if k > b.kernels]
            if not larger:
                continue
            raised = ArchGenome(g.blocks[:i]
                                + (BlockSpec(b.block_type, larger[0]),)
                                + g.blocks[i + 1:])
            base = estimate_network(expand(g, (3, 16, 16), HEAD), hw)
            more = estimate_network(expand(raised, (3, 16, 16), HEAD), hw)
            assert more.total_latency_ns >= base.total_latency_ns
            assert more.total_energy_pj >= base.total_energy_pj

    def test_depth_monotonicity(self):
        rng = np.random.default_rng(4)
        hw = DEFAULT_HARDWARE
        for _ in range(20):
            g = sample_valid(SearchSpace(3, 7), (3, 16, 16), rng)
            # channel-preserving append: the head sees the same flatten width
            extra = BlockSpec(BlockType.MVGG, g.blocks[-1].kernels)
            deeper = ArchGenome(g.blocks + (extra,))
            base = estimate_network(expand(g, (3, 16, 16), HEAD), hw)
            more = estimate_network(expand(deeper, (3, 16, 16), HEAD), hw)
            assert more.total_latency_ns >= base.total_latency_ns
            assert more.total_energy_pj >= base.total_energy_pj

    def test_pool_benefit_reduces_downstream_windows(self):
        with_pool = decode("VGG/32,MVGG/32,MVGG/32")
        without = decode("MVGG/32,MVGG/32,MVGG/32")
        hw = DEFAULT_HARDWARE

        def summed_windows(g):
            ir = expand(g, (3, 32, 32), HEAD)
            return sum(map_layer(l, hw).windows for l in ir.layers
                       if l.kind in (LayerKind.CONV, LayerKind.FC))

        assert summed_windows(with_pool) < summed_windows(without)


class TestHardwareConfig:
    def test_json_round_trip(self):
        obj = DEFAULT_HARDWARE.to_json_obj()
        assert HardwareConfig.from_json_obj(obj) == DEFAULT_HARDWARE

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError):
            HardwareConfig.from_json_obj({"bogus": 1})

    def test_invariants_enforced(self):
        with pytest.raises(ValueError):
            HardwareConfig(cell_bits=9)
        with pytest.raises(ValueError):
            HardwareConfig(t_dac=-1)
