from fractions import Fraction

from hypothesis import strategies as st


def rationals(lo=-2, hi=2, max_den=4):
    return st.builds(lambda n, d: Fraction(n, d), st.integers(lo * max_den, hi * max_den),
                     st.integers(1, max_den)).filter(lambda q: lo <= q <= hi)


@st.composite
def symmetric(draw, p, lo=-2, hi=2, max_den=4):
    D = [[Fraction(0)] * p for _ in range(p)]
    for i in range(p):
        for j in range(i, p):
            D[i][j] = D[j][i] = draw(rationals(lo, hi, max_den))
    return D


@st.composite
def simplex_points(draw, p, max_den=12):
    den = draw(st.integers(1, max_den))
    cuts = sorted(draw(st.lists(st.integers(0, den), min_size=p - 1, max_size=p - 1)))
    parts = [b - a for a, b in zip([0] + cuts, cuts + [den])]
    return tuple(Fraction(v, den) for v in parts)


def matrices(rows, cols, lo=-3, hi=3, max_den=3):
    return st.lists(st.lists(rationals(lo, hi, max_den), min_size=cols, max_size=cols),
                    min_size=rows, max_size=rows)
