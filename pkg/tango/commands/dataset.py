import argparse
import os

from tango import config
from tango.commands.common import resolve_out, resolve_seed, seed_parent
from tango.graphs.datasets import build_gpp_dataset
from tango.graphs.io import write_dataset
from tango.schemas.config import FAMILY_NAMES, DatasetConfig, load_experiment_config
from tango.schemas.dataset import DatasetMeta

NAME = "dataset"


def register(subparsers) -> None:
    p = subparsers.add_parser(NAME, parents=[seed_parent()], help="generate a graph property prediction dataset")
    p.add_argument("--config", default=None, help="take the dataset section of an experiment config")
    p.add_argument("--task", choices=("diameter", "sssp", "eccentricity"), default=None)
    p.add_argument("--train", type=int, default=None)
    p.add_argument("--val", type=int, default=None)
    p.add_argument("--test", type=int, default=None)
    p.add_argument("--n-min", type=int, default=None)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--families", nargs="+", choices=FAMILY_NAMES, default=None)
    p.add_argument("--name", default=None, help="file name inside --out (default: <task>_seed<seed>.jsonl)")
    p.set_defaults(handler=run)


def dataset_spec(args: argparse.Namespace) -> DatasetConfig:
    base = load_experiment_config(args.config).data_spec() if args.config else DatasetConfig()
    data = base.model_dump()
    sizes = list(data["sizes"])
    for i, value in enumerate((args.train, args.val, args.test)):
        if value is not None:
            sizes[i] = value
    data["sizes"] = tuple(sizes)
    for key in ("task", "n_min", "n_max", "families"):
        value = getattr(args, key)
        if value is not None:
            data[key] = value
    if args.seed is not None or not args.config:
        data["seed"] = resolve_seed(args)
    return DatasetConfig.model_validate(data)


def run(args: argparse.Namespace) -> int:
    spec = dataset_spec(args)
    data = build_gpp_dataset(spec)
    path = os.path.join(resolve_out(args, config.DATA_DIR), args.name or f"{spec.task}_seed{spec.seed}.jsonl")
    counts = data.family_counts()
    meta = DatasetMeta(
        seed=spec.seed,
        task=spec.task,
        sizes=spec.sizes,
        families=spec.families,
        node_range=(spec.n_min, spec.n_max),
        counts=counts,
    )
    total = write_dataset(path, data, meta)

    print(f"{path}: {total} graphs")
    for split, by_family in counts.items():
        detail = ", ".join(f"{family}={count}" for family, count in by_family.items())
        print(f"  {split}: {sum(by_family.values())} ({detail})")
    return 0
