from hypothesis import strategies as st

from qcbundle.scalars import Scalar, normalize


def _poly(draw, max_deg=3, nonzero=False):
    coeffs = draw(st.lists(st.integers(-4, 4), min_size=1, max_size=max_deg + 1))
    if nonzero and not any(coeffs):
        coeffs[0] = 1
    return {i: c for i, c in enumerate(coeffs)}


@st.composite
def scalars(draw, laurent_only=False):
    num = _poly(draw)
    shift = draw(st.integers(-3, 3))
    num = {k + shift: c for k, c in num.items()}
    if laurent_only or draw(st.booleans()):
        return Scalar.laurent(num)
    den = _poly(draw, max_deg=2, nonzero=True)
    return normalize(num, den)


@st.composite
def raw_polynomials(draw, presentation, max_degree=4, max_terms=4):
    """Unreduced noncommutative polynomial over the letters of ``presentation``."""
    n = len(presentation.letters)
    raw = {}
    for _ in range(draw(st.integers(1, max_terms))):
        word = tuple(draw(st.lists(st.integers(0, n - 1), max_size=max_degree)))
        coeff = Scalar.laurent({draw(st.integers(-2, 2)): draw(st.sampled_from([-3, -2, -1, 1, 2, 3]))})
        raw[word] = raw.get(word, Scalar.from_int(0)) + coeff
    return raw
