"""Turn a dataclass config into command-line flags (``--field value``)."""

import argparse
import dataclasses
import typing


def parse_config(cls, argv=None):
    parser = argparse.ArgumentParser(description=cls.__doc__)
    hints = typing.get_type_hints(cls)
    for f in dataclasses.fields(cls):
        kind = hints[f.name]
        default = f.default if f.default is not dataclasses.MISSING else f.default_factory()
        flag = "--" + f.name.replace("_", "-")
        if kind is bool:
            parser.add_argument(flag, action=argparse.BooleanOptionalAction, default=default)
        elif typing.get_origin(kind) is tuple:
            (item, *_) = typing.get_args(kind)
            parser.add_argument(flag, type=item, nargs="+", default=default)
        else:
            parser.add_argument(flag, type=kind, default=default)
    ns = parser.parse_args(argv)
    values = {k: tuple(v) if isinstance(v, list) else v for k, v in vars(ns).items()}
    return cls(**values)
