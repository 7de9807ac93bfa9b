"""Write SVG renderings of the boundary images of f_1 and f_1.5.

    python3 scripts/reproduce_figures.py --out-dir figures
"""
import argparse
import json
from pathlib import Path

from schwarzian_lab import cli

FIGURES = {"fig1.svg": 1.0, "fig2.svg": 1.5}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", type=Path, default=Path("figures"))
    ap.add_argument("--samples", type=int, default=4096)
    args = ap.parse_args(argv)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, alpha in FIGURES.items():
        spec = json.dumps({"kind": "f_alpha", "alpha": alpha})
        out = args.out_dir / name
        code = cli.main(["render", "--map", spec, "--samples", str(args.samples), "--out", str(out)])
        if code:
            raise SystemExit(code)
        print(f"wrote {out}")


if __name__ == "__main__":
    main()
