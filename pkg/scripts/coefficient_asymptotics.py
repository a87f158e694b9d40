"""Exact interpolant coefficients against their leading asymptotic terms."""
from dataclasses import dataclass

from _config import parse
from willmore4.triharmonic import asymptotic_report


@dataclass
class Config:
    variant: str = "printed"
    only_failures: bool = False


def main(cfg):
    rows = asymptotic_report(cfg.variant)
    print("entry,predicted_order,fitted_order,ok")
    for r in rows:
        if cfg.only_failures and r["ok"]:
            continue
        print(f"{r['name']},{r['predicted']:.3f},{r['actual']:.3f},{r['ok']}")
    print(f"# {sum(r['ok'] for r in rows)}/{len(rows)} consistent ({cfg.variant})")


if __name__ == "__main__":
    main(parse(Config))
