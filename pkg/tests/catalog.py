"""Group lists shared by the test modules."""

from functools import lru_cache
from itertools import product

from eqalg.groups import SubgroupLattice, parse_group_spec

NONABELIAN_16 = ["S3", "D4", "Q8", "S3xC2", "D4xC2", "Q8xC2"]


def _partitions(k, top=None):
    top = k if top is None else top
    if k == 0:
        yield ()
        return
    for p in range(min(k, top), 0, -1):
        for rest in _partitions(k - p, p):
            yield (p,) + rest


def _factor(n):
    out, p = {}, 2
    while n > 1:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    return out


def abelian_specs(max_order):
    """One spec per isomorphism class of abelian groups of order <= max_order
    (elementary divisor form)."""
    out = []
    for n in range(1, max_order + 1):
        choices = [[[p ** e for e in part] for part in _partitions(k)] for p, k in _factor(n).items()]
        for combo in product(*choices):
            parts = sorted(x for c in combo for x in c)
            out.append("x".join(f"C{x}" for x in parts) or "C1")
    return out


@lru_cache(maxsize=None)
def lattice(spec):
    return SubgroupLattice(parse_group_spec(spec))
