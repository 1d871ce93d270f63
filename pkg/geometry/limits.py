"""
Engine resource limits.

The values come from settings.DEFGEO_LIMITS (populated from the environment) and are
validated once into an immutable model that engine functions pass around.
"""
import humanize
from django.conf import settings
from pydantic import BaseModel, ConfigDict, Field

from geometry.exceptions import GuardExceeded


class EngineLimits(BaseModel):
    """Guards that keep exhaustive computations at desk scale"""

    model_config = ConfigDict(frozen=True)

    arity_cap: int = Field(9, ge=1)
    arity_cap_binary: int = Field(16, ge=1)
    memory_cap_mib: int = Field(1024, ge=1)
    family_cap: int = Field(2 ** 25, ge=1)
    oracle_cap: int = Field(2 ** 20, ge=1)
    clone_cap: int = Field(2 ** 20, ge=1)
    composition_cap: int = Field(2 ** 26, ge=1)
    seed_cap: int = Field(2 ** 22, ge=1)
    generator_arity_cap: int | None = Field(None, ge=1)
    ed_bound: int = Field(4, ge=1)
    canonical_check_bound: int = Field(6, ge=1)
    algebraic_max_universe: int = Field(2, ge=1)
    workers: int = Field(1, ge=1)

    def max_arity(self, k):
        """Largest relation arity allowed over a universe of size k"""
        return self.arity_cap_binary if k <= 2 else self.arity_cap

    def check_arity(self, k, n):
        """Refuse relations over A^n that break the arity cap or the memory guard"""
        cap = self.max_arity(k)
        if n > cap:
            raise GuardExceeded('arity cap', cap, n, hint=f"universe size {k}")
        footprint = (k ** n + 7) // 8
        if footprint > self.memory_cap_mib * 2 ** 20:
            raise GuardExceeded(
                'memory cap', self.memory_cap_mib, hint=f"one relation needs {humanize.naturalsize(footprint, binary=True)}"
            )

    def check_family(self, size, guard='family_cap'):
        """Refuse explicit families larger than the named cap"""
        limit = getattr(self, guard)
        if size > limit:
            raise GuardExceeded(guard.replace('_', ' '), limit, size)

    def generator_cap(self, k):
        """Free-variable arity cap on generator formulas; the comparison arity by default"""
        return self.generator_arity_cap if self.generator_arity_cap is not None else k * k


def get_limits(limits=None):
    """Return the given limits, or the ones configured in settings"""
    if limits is not None:
        return limits
    if not settings.configured:
        return EngineLimits()
    return EngineLimits(**getattr(settings, 'DEFGEO_LIMITS', {}))
