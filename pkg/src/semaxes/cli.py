"""Command-line entry point: ``semaxes <subcommand> ...``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import itertools
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__, axes, crosslang, evalkappa, icasso, kernels
from .config import validate_config
from .embeddings import (build_vocabulary_plan, load_bilingual_dictionary, load_frequency_list,
                         materialize, parse_vec_file)
from .errors import ConfigError, SemaxesError
from .fixture import write_synthetic_fixture
from .ica import IcaConfig
from .pipeline import atomic_write, run_pipeline

logger = logging.getLogger("semaxes")


def _keyed(values, flag):
    """Parse repeated ``lang=path`` options, keeping order."""
    out = {}
    for item in values or []:
        if "=" not in item:
            raise ConfigError(f"{flag} expects LANG=PATH, got {item!r}")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _write(path: Path, text: str) -> None:
    atomic_write(Path(path), text.encode("utf-8"))


def cmd_ingest(args) -> int:
    vecs = _keyed(args.vec, "--vec")
    freqs = _keyed(args.freq, "--freq")
    dicts = _keyed(args.dict, "--dict")
    langs = list(vecs)
    if len(langs) < 2:
        raise ConfigError("give --vec for at least two languages (pivot first)")
    missing = [l for l in langs if l not in freqs] + [l for l in langs[1:] if l not in dicts]
    if missing:
        raise ConfigError(f"missing --freq/--dict for {sorted(set(missing))}")
    embs = [parse_vec_file(vecs[l], args.limit) for l in langs]
    ds = [load_bilingual_dictionary(dicts[l], langs[0], l) for l in langs[1:]]
    fl = [load_frequency_list(freqs[l]) for l in langs]
    plan = build_vocabulary_plan(ds, fl, embs, args.total_size, langs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "vocabulary_plan.json", plan.to_json())
    for lang, mat in zip(langs, materialize(plan, embs)):
        np.save(out / f"{lang}.npy", mat.values)
        _write(out / f"{lang}.words.txt", "\n".join(mat.words) + "\n")
    print(json.dumps({"common_size": plan.common_size, "total_size": plan.total_size,
                      "skipped": plan.skipped}))
    return 0


def cmd_icasso(args) -> int:
    X = np.load(args.matrix)
    seeds = args.seeds if args.seeds else list(range(args.m))
    cfg = IcaConfig(nonlinearity=args.nonlinearity, max_iter=args.max_iter, tol=args.tol)
    res = icasso.run_icasso(X, m=args.m, target_clusters=args.target_clusters,
                            quality_threshold=args.quality_threshold, seeds=seeds, config=cfg,
                            retain=args.retain, linkage=args.linkage)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "icasso_clusters.json", icasso.cluster_report_json(res))
    _write(out / "quality_curve.tsv", icasso.quality_curve_tsv(res))
    np.save(out / "reliable_axes.npy", res.reliable_axes)
    _write(out / "reliable_qualities.txt",
           "\n".join(repr(c.quality) for c in res.reliable) + "\n")
    print(f"{len(res.reliable)} of {len(res.clusters)} clusters above "
          f"quality {args.quality_threshold}")
    return 0


def cmd_axes(args) -> int:
    S_r = np.load(args.axes)
    words = Path(args.words).read_text(encoding="utf-8").split("\n")
    words = [w for w in words if w]
    quals = None
    if args.qualities:
        quals = [float(x) for x in Path(args.qualities).read_text().split()]
    ax = axes.interpret_all(S_r, words, args.k, args.language, quals)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        _write(out / "axes.json", axes.axes_to_json(ax))
        _write(out / "axes.tsv", axes.axes_table_tsv(ax))
    else:
        sys.stdout.write(axes.axes_table_tsv(ax))
    return 0


def cmd_crosslang(args) -> int:
    paths = _keyed(args.axes, "--axes")
    if len(paths) < 2:
        raise ConfigError("give --axes for at least two languages")
    S = {lang: np.load(p) for lang, p in paths.items()}
    sims = [crosslang.cross_similarity(S[a], S[b], args.n_common, a, b)
            for a, b in itertools.combinations(paths, 2)]
    policy = crosslang.make_policy(sims, args.alpha_fd, args.alpha_fp, args.n_tests)
    clusters = crosslang.cluster_across_languages(sims, policy)
    counts = {lang: int(m.shape[0]) for lang, m in S.items()}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    _write(out / "clusters.json", crosslang.cluster_report_json(clusters, policy, counts))
    summ = crosslang.summary(clusters, policy, counts)
    _write(out / "summary.json", json.dumps(summ, indent=1))
    for s in sims:
        _write(out / f"similarity_hist_{s.lang_a}_{s.lang_b}.tsv",
               crosslang.similarity_histogram_tsv(s, args.bins))
    print(f"Bonferroni family size {policy.n_tests} ({policy.n_tests_convention} convention)")
    print(json.dumps(summ, indent=1))
    return 0


def cmd_kappa(args) -> int:
    table = evalkappa.load_ratings_csv(args.ratings)
    res = evalkappa.fleiss_kappa(table)
    text = evalkappa.kappa_report_json(res, table)
    if args.out:
        _write(Path(args.out), text + "\n")
    print(text)
    return 0


def cmd_synth(args) -> int:
    cfg = write_synthetic_fixture(args.out, languages=args.languages, d=args.d, n=args.n,
                                  n_common=args.n_common, shared=args.shared, seed=args.seed,
                                  m=args.m, source_law=args.law)
    print(cfg)
    return 0


def cmd_run(args) -> int:
    cfg = validate_config(args.config)
    if args.output_dir:
        cfg.output_dir = Path(args.output_dir).resolve()
    logger.info("kernel backend: %s", kernels.BACKEND)
    result = run_pipeline(cfg)
    if result.exit_code != 0:
        print(f"error {result.error}", file=sys.stderr)
        return result.exit_code
    summary = Path(cfg.output_dir) / "crosslang" / "summary.json"
    print(summary.read_text(encoding="utf-8"))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semaxes", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("ingest", help="build aligned per-language matrices from .vec files")
    s.add_argument("--vec", action="append", metavar="LANG=PATH", required=True,
                   help="embedding file; the first language given is the pivot")
    s.add_argument("--freq", action="append", metavar="LANG=PATH", required=True)
    s.add_argument("--dict", action="append", metavar="LANG=PATH",
                   help="pivot-to-LANG dictionary, one per non-pivot language")
    s.add_argument("--total-size", type=int, default=50000)
    s.add_argument("--limit", type=int, default=None, help="read at most this many vectors")
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_ingest)

    s = sub.add_parser("icasso", help="repeated ICA and reliability clustering of one matrix")
    s.add_argument("--matrix", required=True, help=".npy file, dims x words")
    s.add_argument("--m", type=int, default=10)
    s.add_argument("--target-clusters", type=int, default=None)
    s.add_argument("--quality-threshold", type=float, default=0.8)
    s.add_argument("--seeds", type=int, nargs="*")
    s.add_argument("--retain", type=int, default=None)
    s.add_argument("--linkage", choices=sorted(kernels.LINKAGE_CODES), default="average")
    s.add_argument("--nonlinearity", choices=sorted(kernels.NONLINEARITY_CODES),
                   default="logcosh")
    s.add_argument("--tol", type=float, default=1e-6)
    s.add_argument("--max-iter", type=int, default=1000)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_icasso)

    s = sub.add_parser("axes", help="label reliable axes with their top words")
    s.add_argument("--axes", required=True, help="reliable_axes.npy")
    s.add_argument("--words", required=True, help="vocabulary, one word per line")
    s.add_argument("--qualities", help="one quality per axis")
    s.add_argument("--language", default="")
    s.add_argument("--k", type=int, default=3)
    s.add_argument("--out")
    s.set_defaults(func=cmd_axes)

    s = sub.add_parser("crosslang", help="match axes across languages")
    s.add_argument("--axes", action="append", metavar="LANG=PATH", required=True)
    s.add_argument("--n-common", type=int, required=True)
    s.add_argument("--alpha-fd", type=float, default=0.01)
    s.add_argument("--alpha-fp", type=float, default=0.01)
    s.add_argument("--n-tests", type=int, default=None,
                   help="Bonferroni family size (default: number of cross-language pairs)")
    s.add_argument("--bins", type=int, default=50)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_crosslang)

    s = sub.add_parser("kappa", help="Fleiss' kappa from a ratings CSV (item,rater,0/1)")
    s.add_argument("--ratings", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_kappa)

    s = sub.add_parser("synth", help="write a synthetic fixture corpus and config")
    s.add_argument("--out", required=True)
    s.add_argument("--languages", nargs="+", default=["en", "ja"])
    s.add_argument("--d", type=int, default=10)
    s.add_argument("--n", type=int, default=2000)
    s.add_argument("--n-common", type=int, default=None)
    s.add_argument("--shared", type=int, default=5)
    s.add_argument("--m", type=int, default=10)
    s.add_argument("--law", choices=["laplace", "uniform", "mixture"], default="laplace")
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("run", help="full pipeline from a config file")
    s.add_argument("--config", required=True)
    s.add_argument("--output-dir", help="override the configured output directory")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except SemaxesError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, OSError) as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 3
    except ArithmeticError as exc:
        print(f"error [{args.command}]: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
