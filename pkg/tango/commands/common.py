import argparse
import logging
import os
from typing import Optional

from tango import config
from tango.schemas.config import ExperimentConfig, load_experiment_config, with_overrides

logger = logging.getLogger(__name__)

VARIANTS = ("full", "non-energy", "non-tangent", "descent-only")


def seed_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="random seed (default: TANGO_SEED)")
    parent.add_argument("--out", default=None, help="output directory")
    return parent


def experiment_parent() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", required=True, help="experiment config (JSON)")
    parent.add_argument("--threads", type=int, default=None, help="worker threads for batch gradients")
    parent.add_argument("--variant", choices=VARIANTS, default=None)
    parent.add_argument("--compat-projection", action="store_true", help="use the printed projection form")
    return parent


def resolve_seed(args: argparse.Namespace) -> int:
    return config.DEFAULT_SEED if args.seed is None else args.seed


def resolve_out(args: argparse.Namespace, default: Optional[str] = None) -> str:
    out = args.out or default or config.OUTPUT_DIR
    os.makedirs(out, exist_ok=True)
    return out


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_experiment_config(args.config)
    cfg = with_overrides(
        cfg,
        seed=args.seed,
        threads=args.threads,
        out=args.out,
        variant=args.variant,
        compat_projection=args.compat_projection,
    )
    logger.info(f"Loaded {args.config} (model={cfg.model}, variant={cfg.tango.variant}, seeds={cfg.seeds})")
    return cfg
