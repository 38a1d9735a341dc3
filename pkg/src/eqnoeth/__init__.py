"""Exact-arithmetic toolkit for equations over groups.

Submodules:
    words       free-group and mixed words, reduction, evaluation, transforms
    fingrp      finite groups as multiplication tables
    varieties   brute-force solution sets and minimal-subsystem search
    matpoly     exact integer/polynomial matrices, unitriangular chains
    metabelian  group-ring arithmetic and split-extension equation decomposition
    wreath      restricted wreath products, spread elements, separability certificates
    gog         graphs of groups, Britton reduction, compatible collections
    cli         command-line entry point
"""

from importlib import import_module

__all__ = ["words", "fingrp", "varieties", "matpoly", "metabelian", "wreath", "gog", "cli"]
__version__ = "0.1.0"


def __getattr__(name: str):
    if name in __all__:
        return import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
