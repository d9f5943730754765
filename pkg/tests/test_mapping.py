import math

import numpy as np
import pytest
from hypothesis import given, strategies as hs

from tablefold.errors import MappingError
from tablefold.mapping import (MappingSpec, OutOfRange, apply_mapping,
                               apply_mapping_array, derive_domain)


class TestApplyMapping:
    def test_linear(self):
        spec = MappingSpec(kind="linear", domain=(0, 100))
        assert apply_mapping(spec, 50) == 0.5

    def test_inverse_linear(self):
        spec = MappingSpec(kind="inverse_linear", domain=(0, 1))
        assert apply_mapping(spec, 0.3) == pytest.approx(0.7)

    def test_log10(self):
        spec = MappingSpec(kind="log10", domain=(1, 1000))
        assert apply_mapping(spec, 10) == pytest.approx(1 / 3)

    def test_missing_passes_through(self):
        spec = MappingSpec(domain=(0, 1))
        assert apply_mapping(spec, None) is None
        assert apply_mapping(spec, math.nan) is None

    def test_out_of_range_marker(self):
        spec = MappingSpec(domain=(0, 10), clip=False)
        out = apply_mapping(spec, 20)
        assert isinstance(out, OutOfRange)
        assert out.clamped == 1.0 and out.raw == 20.0

    def test_clip(self):
        spec = MappingSpec(domain=(0, 10), clip=True)
        assert apply_mapping(spec, 20) == 1.0
        assert apply_mapping(spec, -5) == 0.0

    def test_log10_nonpositive(self):
        clip = MappingSpec(kind="log10", domain=(1, 100), clip=True)
        assert apply_mapping(clip, -3) == 0.0
        strict = MappingSpec(kind="log10", domain=(1, 100), clip=False)
        with pytest.raises(MappingError):
            apply_mapping(strict, 0)

    def test_invalid_specs(self):
        with pytest.raises(MappingError):
            MappingSpec(domain=(5, 5))
        with pytest.raises(MappingError):
            MappingSpec(kind="log10", domain=(0, 10))
        with pytest.raises(MappingError):
            MappingSpec(kind="sqrt", domain=(0, 1))

    def test_array_matches_scalar(self, rng):
        spec = MappingSpec(kind="linear", domain=(-3, 7), clip=False)
        raw = rng.normal(size=100) * 5
        raw[::7] = math.nan
        mapped, oob = apply_mapping_array(spec, raw)
        for i, x in enumerate(raw):
            scalar = apply_mapping(spec, float(x))
            if math.isnan(x):
                assert math.isnan(mapped[i])
            elif isinstance(scalar, OutOfRange):
                assert oob[i]
                assert mapped[i] == scalar.clamped
            else:
                assert not oob[i]
                assert mapped[i] == pytest.approx(scalar)


class TestDeriveDomain:
    def test_skips_missing(self):
        assert derive_domain([3, None, 7]) == (3.0, 7.0)

    def test_degenerate_widens(self):
        assert derive_domain([5, 5, 5]) == (4.5, 5.5)

    def test_all_missing(self):
        with pytest.raises(MappingError):
            derive_domain([None, math.nan])

    def test_against_scan_oracle(self, rng):
        vals = rng.uniform(-100, 100, size=1000)
        lo = hi = vals[0]
        for v in vals[1:]:
            lo = min(lo, v)
            hi = max(hi, v)
        assert derive_domain(vals) == (lo, hi)


class TestProperties:
    @given(hs.floats(1.0, 999.0), hs.floats(1.0, 999.0))
    def test_monotone(self, a, b):
        if a == b:
            return
        lo, hi = min(a, b), max(a, b)
        lin = MappingSpec(kind="linear", domain=(0.5, 1000.0))
        log = MappingSpec(kind="log10", domain=(0.5, 1000.0))
        inv = MappingSpec(kind="inverse_linear", domain=(0.5, 1000.0))
        assert apply_mapping(lin, lo) < apply_mapping(lin, hi)
        assert apply_mapping(log, lo) < apply_mapping(log, hi)
        assert apply_mapping(inv, lo) > apply_mapping(inv, hi)

    @given(hs.floats(allow_nan=False, allow_infinity=False, width=32))
    def test_clip_stays_unit(self, x):
        spec = MappingSpec(domain=(-10.0, 10.0), clip=True)
        assert 0.0 <= apply_mapping(spec, float(x)) <= 1.0

    def test_order_preserved_under_linear(self, rng):
        spec = MappingSpec(domain=(-50.0, 50.0), clip=False)
        vals = rng.uniform(-50, 50, size=300)
        mapped = [apply_mapping(spec, float(v)) for v in vals]
        for i in range(0, 290, 7):
            a, b = vals[i], vals[i + 1]
            ma, mb = mapped[i], mapped[i + 1]
            assert np.sign(a - b) == np.sign(ma - mb)
