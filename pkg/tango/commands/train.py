import argparse

from tango.commands.common import experiment_parent, load_config, seed_parent
from tango.services.experiments import run_experiment

NAME = "train"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, parents=[seed_parent(), experiment_parent()], help="train per seed and write artifacts")
    p.set_defaults(handler=run)


def run(args: argparse.Namespace) -> int:
    cfg = load_config(args)
    summary = run_experiment(cfg)
    for r in summary.seeds:
        print(f"seed {r.seed}: test {summary.metric} = {r.test_metric:.6g} (best epoch {r.best_epoch})")
    print(f"{summary.name} [{summary.model}/{summary.variant}]: {summary.metric} = {summary.test_metric_mean:.6g} +- {summary.test_metric_std:.6g}")
    return 0
