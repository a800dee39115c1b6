"""Torch training mode: builds the block network from the genome, trains for
the requested number of epochs, and reports held-out accuracy.

Datasets are located under ``--data-root`` as ``<tag>.npz`` archives with
arrays ``x`` (N, c, h, w) float32 and ``y`` (N,) int64, except ``synthetic``,
which is generated on the fly (two well-separated Gaussian classes). Runs are
seeded for best-effort determinism but are not bit-exact across torch builds.
"""

from __future__ import annotations

from pathlib import Path

from .genome import DATASETS, GenomeError, HIDDEN_UNITS, Block


def build_model(blocks: tuple[Block, ...], input_shape, num_classes: int):
    import torch.nn as nn

    class Residual(nn.Module):
        def __init__(self, cin, k):
            super().__init__()
            self.main = nn.Sequential(
                nn.Conv2d(cin, k, 3, padding=1), nn.BatchNorm2d(k), nn.ReLU(),
                nn.Conv2d(k, k, 3, padding=1), nn.BatchNorm2d(k))
            self.shortcut = nn.Conv2d(cin, k, 1)
            self.relu = nn.ReLU()

        def forward(self, x):
            return self.relu(self.main(x) + self.shortcut(x))

    c, h, w = input_shape
    layers = []
    for i, b in enumerate(blocks):
        if h < 1 or w < 1:
            raise GenomeError(f"spatial size collapsed before block {i}")
        k = b.kernels
        if b.block_type == "RES":
            layers.append(Residual(c, k))
        else:
            layers += [nn.Conv2d(c, k, 3, padding=1),
                       nn.Conv2d(k, k, 3, padding=1), nn.ReLU()]
            if b.block_type == "VGG":
                layers.append(nn.MaxPool2d(2))
                h, w = h // 2, w // 2
        c = k
    if h < 1 or w < 1:
        raise GenomeError("spatial size collapsed at the network head")
    layers += [nn.Flatten(), nn.Linear(c * h * w, HIDDEN_UNITS), nn.ReLU(),
               nn.Dropout(0.5), nn.Linear(HIDDEN_UNITS, num_classes)]
    return nn.Sequential(*layers)


def synthetic_dataset(seed: int):
    """Two separable classes: opposite-sign means, small noise."""
    import torch
    shape, _ = DATASETS["synthetic"]
    g = torch.Generator().manual_seed(seed)
    n_per_class = 256
    xs, ys = [], []
    for label, mean in ((0, -0.5), (1, 0.5)):
        xs.append(mean + 0.25 * torch.randn((n_per_class, *shape), generator=g))
        ys.append(torch.full((n_per_class,), label, dtype=torch.long))
    x = torch.cat(xs)
    y = torch.cat(ys)
    order = torch.randperm(len(x), generator=g)
    return x[order], y[order]


def load_dataset(tag: str, data_root: str | None, seed: int):
    if tag == "synthetic":
        return synthetic_dataset(seed)
    import numpy as np
    import torch
    path = Path(data_root or ".") / f"{tag}.npz"
    if not path.exists():
        raise GenomeError(
            f"dataset {tag!r} not found: expected {path} with arrays x, y")
    with np.load(path) as archive:
        x = torch.as_tensor(archive["x"], dtype=torch.float32)
        y = torch.as_tensor(archive["y"], dtype=torch.long)
    return x, y


def train_eval(blocks: tuple[Block, ...], dataset: str, seed: int, epochs: int,
               data_root: str | None = None) -> tuple[float, dict]:
    import torch
    torch.manual_seed(seed)
    shape, classes = DATASETS[dataset]
    x, y = load_dataset(dataset, data_root, seed)
    split = int(0.8 * len(x))
    model = build_model(blocks, shape, classes)
    optimizer = torch.optim.Adam(model.parameters(), lr=1e-3)
    loss_fn = torch.nn.CrossEntropyLoss()
    batch = 32
    model.train()
    for _ in range(epochs):
        for start in range(0, split, batch):
            optimizer.zero_grad()
            loss = loss_fn(model(x[start:start + batch]), y[start:start + batch])
            loss.backward()
            optimizer.step()
    model.eval()
    with torch.no_grad():
        predicted = model(x[split:]).argmax(dim=1)
        accuracy = (predicted == y[split:]).float().mean().item()
    return accuracy, {"mode": "train", "epochs": epochs,
                      "test_samples": len(x) - split}
