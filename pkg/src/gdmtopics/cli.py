"""Command-line front end: simulate, fit, eval, topics, lambda-sweep, rerun.

Every command writes a JSON manifest next to its outputs with the exact
argument vector, so any run can be reproduced with ``gdmtopics rerun``.
Exit codes: 0 success, 1 runtime/data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__
from .corpus import (
    Corpus,
    CorpusError,
    load_uci_bag_of_words,
    normalize,
    save_uci_bag_of_words,
)
from .gdm import GdmConfig, fit_gdm, fit_ngdm, load_model, save_model
from .geometry import TopicPolytope
from .metrics import infer_theta, min_matching_distance, perplexity
from .synth import LdaParams, generate_corpus


def _parse_doc_lengths(text):
    if ":" in text:
        lo, hi = text.split(":", 1)
        return (int(lo), int(hi))
    return int(text)


def _write_manifest(path, command, argv, inputs, outputs, started):
    manifest = {
        "command": command,
        "argv": list(argv),
        "inputs": sorted(inputs),
        "outputs": sorted(outputs),
        "duration_sec": time.time() - started,
        "version": __version__,
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=1, sort_keys=True)
        f.write("\n")


def _load_corpus_dir(path):
    docword = os.path.join(path, "docword.txt")
    vocab = os.path.join(path, "vocab.txt")
    if not os.path.exists(docword):
        raise CorpusError(f"no docword.txt under {path}")
    return load_uci_bag_of_words(docword, vocab if os.path.exists(vocab) else None)


def _cmd_simulate(args, argv):
    started = time.time()
    params = LdaParams(
        K=args.K,
        V=args.V,
        M=args.M,
        doc_lengths=_parse_doc_lengths(args.Nm),
        alpha=args.alpha,
        eta=args.eta,
        seed=args.seed,
    )
    corpus, truth = generate_corpus(params)
    os.makedirs(args.out, exist_ok=True)
    docword = os.path.join(args.out, "docword.txt")
    truth_path = os.path.join(args.out, "truth.json")
    save_uci_bag_of_words(corpus, docword)
    with open(truth_path, "w", encoding="utf-8") as f:
        json.dump(
            {
                "beta": truth.beta.tolist(),
                "theta": truth.theta.tolist(),
                "params": {
                    "K": params.K,
                    "V": params.V,
                    "M": params.M,
                    "Nm": args.Nm,
                    "alpha": params.alpha,
                    "eta": params.eta,
                    "seed": params.seed,
                },
            },
            f,
            sort_keys=True,
        )
        f.write("\n")
    _write_manifest(
        os.path.join(args.out, "manifest.json"),
        "simulate",
        argv,
        [],
        [docword, truth_path],
        started,
    )
    print(f"wrote {corpus.M} documents (V={corpus.V}) to {args.out}")
    return 0


def _fit_config(args, parser):
    if args.algo in ("gdm", "tgdm"):
        if args.K is None:
            parser.error(f"--algo {args.algo} requires --K")
        if getattr(args, "lam", None) is not None:
            parser.error(f"--algo {args.algo} does not accept --lambda")
        return GdmConfig(
            K=args.K,
            restarts=args.restarts,
            max_iters=args.max_iters,
            weighted_center=not args.unweighted_center,
            tune=(args.algo == "tgdm"),
            seed=args.seed,
        )
    if args.K is not None:
        parser.error("--algo ngdm does not accept --K")
    if args.lam is None:
        parser.error("--algo ngdm requires --lambda")
    return GdmConfig(
        lam=args.lam,
        restarts=args.restarts,
        max_iters=args.max_iters,
        weighted_center=not args.unweighted_center,
        tune=args.tune,
        seed=args.seed,
    )


def _cmd_fit(args, argv, parser):
    started = time.time()
    config = _fit_config(args, parser)
    corpus = _load_corpus_dir(args.inp)
    data = normalize(corpus)
    if config.K is not None:
        model = fit_gdm(data, config)
    else:
        model = fit_ngdm(data, config)
    save_model(model, args.out)
    _write_manifest(args.out + ".manifest.json", "fit", argv, [args.inp], [args.out], started)
    print(
        f"algo={args.algo} K={model.K} objective={model.objective:.6g} "
        f"elapsed={time.time() - started:.2f}s"
    )
    return 0


def _cmd_eval(args, argv):
    started = time.time()
    model = load_model(args.model)
    heldout = _load_corpus_dir(args.heldout)
    if heldout.V != model.polytope.V:
        print(
            f"error: model has V={model.polytope.V} but held-out corpus has V={heldout.V}",
            file=sys.stderr,
        )
        return 1
    theta = infer_theta(model.polytope, heldout)
    report = perplexity(model.polytope, theta, heldout)
    out = {
        "perplexity": report.perplexity,
        "floored_entries": report.floored_entries,
        "total_tokens": report.total_tokens,
    }
    if args.truth:
        with open(args.truth, "r", encoding="utf-8") as f:
            truth = json.load(f)
        beta = np.asarray(truth["beta"], dtype=np.float64)
        if beta.shape[1] != model.polytope.V:
            print("error: truth beta dimensions disagree with model", file=sys.stderr)
            return 1
        out["mm_distance"] = min_matching_distance(model.polytope, TopicPolytope(beta))
    text = json.dumps(out, sort_keys=True)
    print(text)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        _write_manifest(
            args.out + ".manifest.json", "eval", argv, [args.model, args.heldout], [args.out], started
        )
    return 0


def _cmd_topics(args, argv):
    model = load_model(args.model)
    with open(args.vocab, "r", encoding="utf-8") as f:
        vocab = [line.rstrip("\n") for line in f]
    while vocab and vocab[-1] == "":
        vocab.pop()
    if len(vocab) != model.polytope.V:
        print(
            f"error: vocabulary has {len(vocab)} words, model expects {model.polytope.V}",
            file=sys.stderr,
        )
        return 1
    beta = model.polytope.vertices
    for k in range(model.K):
        # stable sort on index breaks probability ties toward lower indices
        order = np.argsort(-beta[k], kind="stable")[: args.top]
        words = " ".join(vocab[i] for i in order)
        print(f"topic {k}: {words}")
    return 0


def _cmd_lambda_sweep(args, argv):
    started = time.time()
    corpus = _load_corpus_dir(args.inp)
    data = normalize(corpus)
    lambdas = [float(x) for x in args.lambdas.split(",")]
    rows = ["lambda,seed,n_topics,objective"]
    for lam in lambdas:
        config = GdmConfig(
            lam=lam,
            restarts=args.restarts,
            max_iters=args.max_iters,
            seed=args.seed,
        )
        model = fit_ngdm(data, config)
        rows.append(f"{lam},{args.seed},{model.K},{model.objective:.8g}")
        print(rows[-1])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write("\n".join(rows) + "\n")
        _write_manifest(
            args.out + ".manifest.json", "lambda-sweep", argv, [args.inp], [args.out], started
        )
    return 0


def _cmd_rerun(args, argv):
    with open(args.manifest, "r", encoding="utf-8") as f:
        manifest = json.load(f)
    return main(manifest["argv"])


def _build_parser():
    parser = argparse.ArgumentParser(prog="gdmtopics", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="generate a synthetic corpus with ground truth")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--V", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--Nm", required=True, help="document length: int or 'min:max'")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--eta", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("fit", help="fit a topic polytope")
    p.add_argument("--algo", choices=("gdm", "tgdm", "ngdm"), required=True)
    p.add_argument("--K", type=int)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=1500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--unweighted-center", action="store_true")
    p.add_argument("--tune", action="store_true", help="tune extensions after ngdm")
    p.add_argument("--threads", type=int, default=None, help="cap worker threads (no effect on results)")
    p.add_argument("--in", dest="inp", required=True, help="corpus directory (docword.txt [+ vocab.txt])")
    p.add_argument("--out", required=True, help="model JSON path")

    p = sub.add_parser("eval", help="evaluate a fitted model on held-out documents")
    p.add_argument("--model", required=True)
    p.add_argument("--heldout", required=True, help="held-out corpus directory")
    p.add_argument("--truth", default=None, help="truth.json enabling MM distance")
    p.add_argument("--out", default=None, help="optional report JSON path")

    p = sub.add_parser("topics", help="print top words per topic")
    p.add_argument("--model", required=True)
    p.add_argument("--vocab", required=True)
    p.add_argument("--top", type=int, default=10)

    p = sub.add_parser("lambda-sweep", help="fit ngdm across a lambda grid, emit CSV")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--lambdas", required=True, help="comma-separated lambda values")
    p.add_argument("--restarts", type=int, default=10)
    p.add_argument("--max-iters", type=int, default=1500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="optional CSV path")

    p = sub.add_parser("rerun", help="re-execute a command from its manifest")
    p.add_argument("manifest")
    return parser


def main(argv=None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        os.environ.setdefault("OMP_NUM_THREADS", str(args.threads))
    try:
        if args.command == "simulate":
            return _cmd_simulate(args, argv)
        if args.command == "fit":
            return _cmd_fit(args, argv, parser)
        if args.command == "eval":
            return _cmd_eval(args, argv)
        if args.command == "topics":
            return _cmd_topics(args, argv)
        if args.command == "lambda-sweep":
            return _cmd_lambda_sweep(args, argv)
        if args.command == "rerun":
            return _cmd_rerun(args, argv)
    except (CorpusError, ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    raise AssertionError("unreachable")


if __name__ == "__main__":
    sys.exit(main())
