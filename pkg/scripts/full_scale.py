"""Full-scale run on FastText Common Crawl vectors (English, Japanese, Chinese).

Not a test: the downloads are about 13 GB and the run takes hours. Usage:

    python3 scripts/full_scale.py --data data/ --download
    python3 scripts/full_scale.py --data data/ --limit 200000

Sources:
  vectors       https://dl.fbaipublicfiles.com/fasttext/vectors-crawl/cc.{lang}.300.vec.gz
  dictionaries  https://dl.fbaipublicfiles.com/arrival/dictionaries/en-{lang}.txt

FastText ``.vec`` files list words by descending corpus frequency, so each
language's frequency list is simply its vector file's word order.

The run ends by printing the cross-language summary; the quality curve for
each language is in ``<out>/<lang>/quality_curve.tsv``.
"""

import argparse
import gzip
import shutil
import sys
import urllib.request
from pathlib import Path

from semaxes.config import validate_config
from semaxes.pipeline import run_pipeline

LANGS = ("en", "ja", "zh")
VEC_URL = "https://dl.fbaipublicfiles.com/fasttext/vectors-crawl/cc.{lang}.300.vec.gz"
DICT_URL = "https://dl.fbaipublicfiles.com/arrival/dictionaries/en-{lang}.txt"


def fetch(url, dest: Path):
    if dest.exists():
        return
    print(f"downloading {url}", file=sys.stderr)
    tmp = dest.with_suffix(dest.suffix + ".part")
    with urllib.request.urlopen(url) as r, open(tmp, "wb") as fh:
        shutil.copyfileobj(r, fh)
    tmp.replace(dest)


def gunzip(src: Path, dest: Path):
    if dest.exists():
        return
    with gzip.open(src, "rb") as fi, open(dest, "wb") as fo:
        shutil.copyfileobj(fi, fo)


def frequency_from_vec(vec: Path, dest: Path, limit):
    with open(vec, "rb") as fi, open(dest, "wb") as fo:
        fi.readline()
        for k, line in enumerate(fi):
            if limit is not None and k >= limit:
                break
            fo.write(line.split(b" ", 1)[0] + b"\n")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--data", type=Path, required=True)
    ap.add_argument("--out", type=Path, default=None)
    ap.add_argument("--download", action="store_true")
    ap.add_argument("--limit", type=int, default=None, help="read only the most frequent words")
    ap.add_argument("--total-size", type=int, default=50000)
    ap.add_argument("--m", type=int, default=10, help="ICA runs per language")
    ap.add_argument("--retain", type=int, default=300, help="components kept (= clusters)")
    args = ap.parse_args()
    data = args.data
    data.mkdir(parents=True, exist_ok=True)

    if args.download:
        for lang in LANGS:
            gz = data / f"cc.{lang}.300.vec.gz"
            fetch(VEC_URL.format(lang=lang), gz)
            gunzip(gz, data / f"cc.{lang}.300.vec")
            if lang != "en":
                fetch(DICT_URL.format(lang=lang), data / f"en-{lang}.txt")

    lines = ["[pipeline]", f"output_dir = {args.out or data / 'output'}",
             f"languages = {', '.join(LANGS)}", f"total_size = {args.total_size}", "",
             "[icasso]", f"m = {args.m}", "", "[ica]", f"retain = {args.retain}", ""]
    for lang in LANGS:
        vec = data / f"cc.{lang}.300.vec"
        freq = data / f"{lang}.freq.txt"
        frequency_from_vec(vec, freq, args.limit)
        lines += [f"[lang.{lang}]", f"embeddings = {vec.resolve()}", f"frequency = {freq.resolve()}"]
        if lang != "en":
            lines.append(f"dictionary = {(data / f'en-{lang}.txt').resolve()}")
        if args.limit:
            lines.append(f"limit = {args.limit}")
        lines.append("")
    cfg_path = data / "full_scale.ini"
    cfg_path.write_text("\n".join(lines), encoding="utf-8")

    cfg = validate_config(cfg_path)
    result = run_pipeline(cfg)
    if result.exit_code:
        print(result.error, file=sys.stderr)
        return result.exit_code
    print((Path(cfg.output_dir) / "crosslang" / "summary.json").read_text(encoding="utf-8"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
