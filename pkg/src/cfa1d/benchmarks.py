"""Seeded synthetic benchmarks used by the acceptance tests and docs.

Two fixed scenes:

* ``canonical``: 20 Gaussian classes in 64 dimensions arranged in groups
  of 4 that share a base center (similar-looking classes), plus strong
  per-sample variation along 4 axes shared by every class, the way
  lighting and expression cut across face identities.  The tradeoff
  designs suppress both kinds of shared structure and decode the small
  class-distinct offsets; a filter matched to the raw class means lights
  up a whole group at once and collapses to within-group guessing.
* ``warped``: classes arranged as interleaved concentric rings in two
  dimensions, so class identity rides on the radius (a fixed quadratic
  form of the coordinates) and is non-monotone in it.  Linear filters
  hover near chance; the rbf kernel bank resolves the rings locally.
  The ambient dimension is deliberately low: with isotropic directions
  in high dimension all pairwise distances concentrate and no local
  kernel can see the radial structure either.

All constants are frozen; change them only together with the recorded
benchmark expectations in the tests.
"""

from __future__ import annotations

from .data import SplitSpec, SyntheticSpec

MASTER_SEED = 42


def canonical_spec(seed: int = MASTER_SEED) -> SyntheticSpec:
    """Separable scene with grouped classes and shared nuisance axes."""
    return SyntheticSpec(
        L=20,
        dim=64,
        per_class=6,
        cluster_spread=0.3,
        between_spread=2.5,
        warp="none",
        rng_seed=seed,
        shared_rank=4,
        shared_spread=6.0,
        group_size=4,
        distinct_spread=0.6,
    )


def warped_spec(seed: int = MASTER_SEED) -> SyntheticSpec:
    """Interleaved-shell scene for the kernel-benefit benchmark."""
    return SyntheticSpec(
        L=5,
        dim=2,
        per_class=48,
        cluster_spread=0.08,
        between_spread=2.4,
        warp="quadratic",
        rng_seed=seed,
    )


def canonical_split(seed: int = MASTER_SEED, repetitions: int = 20) -> SplitSpec:
    """Three training samples per class, twenty repetitions."""
    return SplitSpec(m=3, repetitions=repetitions, rng_seed=seed)


def warped_split(seed: int = MASTER_SEED, repetitions: int = 20) -> SplitSpec:
    """Split used with the warped scene; more training coverage per ring."""
    return SplitSpec(m=24, repetitions=repetitions, rng_seed=seed)
