"""
Helpers shared by the geometry tests: sample files and small hand-built algebras.
"""
from pathlib import Path

from geometry.parsing import parse_spec, parse_structure
from geometry.structures import Structure

SAMPLES = Path(__file__).resolve().parent.parent / 'samples'


def sample_path(kind, name):
    return str(SAMPLES / kind / name)


def sample_structure(name):
    return parse_structure((SAMPLES / 'structures' / f"{name}.str").read_text(encoding='utf-8'))


def sample_spec(name, structure):
    return parse_spec((SAMPLES / 'specs' / f"{name}.spec").read_text(encoding='utf-8'), ctx=structure)


def binary_algebra(table, name='a'):
    """Algebra on {0..k-1} with a single binary operation f given by its flat table"""
    k = {4: 2, 9: 3}[len(table)]
    return Structure.build(name, k, ops={'f': tuple(table)})
