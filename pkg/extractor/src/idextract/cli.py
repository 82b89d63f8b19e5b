"""Command line: extract per-layer last-token states for one run."""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import datasets
from .errors import ExtractError
from .runner import load_model, run_extraction


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="idextract", description=__doc__)
    p.add_argument("--model", required=True, help="model id or local checkpoint directory")
    p.add_argument("--dataset", default="demo",
                   help="'demo' for the bundled task, or a CSV with input/output columns")
    p.add_argument("--template", default=None,
                   help="prompt template with {input} and {output} slots (default: demo template)")
    p.add_argument("--k", type=int, default=0, help="demonstrations per prompt (0 = zero-shot)")
    p.add_argument("--sft-step", type=int, default=None,
                   help="tag the run as a fine-tuning checkpoint at this step instead of icl")
    p.add_argument("--n-eval", type=int, default=200, help="evaluation prompts to extract")
    p.add_argument("--pool-size", type=int, default=1000, help="demo-task pool size")
    p.add_argument("--unique-demos", action="store_true",
                   help="never reuse a demonstration across prompts")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--out", required=True, help="output directory for layer files + manifest")
    return p


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.dataset == "demo":
            items = datasets.demo_task(args.pool_size + args.n_eval)
            dataset_name = "vowel-parity-demo"
            template = args.template or datasets.DEMO_TEMPLATE
        else:
            items = datasets.load_csv_dataset(args.dataset)
            dataset_name = Path(args.dataset).stem
            template = args.template
            if template is None:
                raise ExtractError("--template is required for CSV datasets")
        pool, eval_items = datasets.split_pool_eval(items, args.n_eval)
        bundle = load_model(args.model)
        result = run_extraction(
            bundle,
            template,
            pool,
            eval_items,
            args.out,
            model_name=Path(args.model).name or args.model,
            dataset_name=dataset_name,
            k=args.k,
            sft_step=args.sft_step,
            unique_across_prompts=args.unique_demos,
            seed=args.seed,
            batch_size=args.batch_size,
            answer_labels=datasets.label_set(items),
        )
    except (ExtractError, ValueError) as exc:
        print(f"idextract: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"idextract: i/o error: {exc}", file=sys.stderr)
        return 2
    acc = "n/a" if result.accuracy is None else f"{result.accuracy:.4f}"
    print(f"wrote {len(result.layer_files)} layer files for {result.n_prompts} prompts "
          f"(accuracy {acc}) to {args.out}")
    return 0


def main() -> None:
    sys.exit(run())
