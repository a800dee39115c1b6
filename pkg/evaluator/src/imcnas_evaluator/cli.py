import argparse
import sys

from .server import serve_protocol, stub_evaluate


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="imcnas-evaluator",
        description="Accuracy evaluator speaking line-delimited JSON on "
                    "stdin/stdout; run as a child process of the search engine.")
    parser.add_argument("--stub", action="store_true",
                        help="answer with the deterministic surrogate formula "
                             "instead of training")
    parser.add_argument("--data-root", default=None,
                        help="directory holding <dataset>.npz archives")
    args = parser.parse_args(argv)

    if args.stub:
        evaluate = stub_evaluate
    else:
        from .training import train_eval

        def evaluate(blocks, dataset, seed, epochs):
            return train_eval(blocks, dataset, seed, epochs, args.data_root)

    serve_protocol(sys.stdin, sys.stdout, evaluate)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
