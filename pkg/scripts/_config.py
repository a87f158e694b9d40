"""Command-line overrides for dataclass experiment configs."""
import argparse
import dataclasses


def _parser_type(default):
    if isinstance(default, bool):
        return lambda s: s.lower() in ("1", "true", "yes")
    if isinstance(default, tuple):
        kind = type(default[0]) if default else float
        return lambda s: tuple(kind(v) for v in s.split(",") if v)
    return type(default)


def parse(cls, argv=None):
    ap = argparse.ArgumentParser(description=cls.__doc__)
    for f in dataclasses.fields(cls):
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        ap.add_argument("--" + f.name.replace("_", "-"), type=_parser_type(default), default=default)
    return cls(**vars(ap.parse_args(argv)))
