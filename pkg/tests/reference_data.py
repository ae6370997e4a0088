"""Reference values transcribed for the tests, with the corrections they need.

Each congruence system is stored exactly as printed.  ``CORRECTIONS`` lists
the single-term fixes that turn a printed system into the lattice of a
maximal order; the tests check both that the corrected system is right and
that the uncorrected one does not describe an order at all.
"""

from __future__ import annotations

from fractions import Fraction

# signatures of groups containing a genus-two surface group, as printed
PRINTED_SUPERSIGNATURES = [
    "(0;2,3,7)", "(0;2,3,8)", "(0;2,3,9)", "(0;2,3,10)", "(0;2,3,12)",
    "(0;2,4,5)", "(0;2,4,6)", "(0;2,4,8)", "(0;2,4,12)", "(0;2,5,5)",
    "(0;2,5,6)", "(0;2,5,10)", "(0;2,6,6)", "(0;2,8,8)", "(0;3,3,4)",
    "(0;3,3,5)", "(0;3,3,6)", "(0;3,3,9)", "(0;3,4,4)", "(0;3,6,6)",
    "(0;4,4,4)", "(0;5,5,5)", "(0;2,2,2,3)", "(0;2,2,2,4)", "(0;2,2,2,6)",
    "(0;2,2,3,3)", "(0;2,2,4,4)", "(0;3,3,3,3)", "(0;2,2,2,2,2)",
    "(0;2,2,2,2,2,2)", "(1;2)", "(1;3)", "(1;2,2)",
]  # fmt: skip

# coarea of the norm-one group with no finite ramification, over pi
COAREAS = {
    49: Fraction(1, 21),
    38569: Fraction(2, 3),
    3981: Fraction(1),
    2304: Fraction(1, 2),
    1957: Fraction(1, 3),
    5744: Fraction(5, 3),
    106069: Fraction(4),
}

# (field, algebra) -> (scale applied before reading coordinates, [(linear form, modulus)])
# a scale of None means 2 * (1 + a)
PRINTED_CONGRUENCES = {
    ("k7", "ram-2-7"): (
        2,
        [(t, 2) for t in ("x0+u0", "y0+u0+v0", "x1+u1", "y1+u1+v1", "x2+u2", "y2+u2+v2")],
    ),
    ("d3981", "ram-3"): (
        2,
        [
            (t, 2)
            for t in (
                "x0+u0+u3+v0", "y0+u2+u3+v0+v3", "x1+u0+v1", "y1+u3+v0+v1",
                "x2+u1+u2+v2", "y2+u0+v1+v2", "x3+u2+v3", "y3+u1+u2+u3+v2",
            )
        ],
    ),
    ("d4752", "ram-2"): (
        None,
        [
            ("4x0-x1+x2-x3+u0+2u1-2u2+2u3-3v0+3v2", 6),
            ("x0-x1+x2-x3-2u0+2u1-8u2-7u3-v1+v1", 6),
            ("4y0-y1+y2-y3-u0-2u1+2u2+u3+v0+2v1-2v2+2v3", 6),
            ("y0-y1+y2-y3+2u0-2u1-u2+u3-2v0+2v1-2v2-v3", 6),
            ("-u0+u1-u2+u3", 3),
            ("x2+x3+u1+v1+v3", 2),
            ("x0+x1+x2+u2+v0", 2),
            ("y2+y3+u0+u1+v1", 2),
            ("y0+y1+y2+u1+u2+u3+v2", 2),
        ],
    ),
}  # fmt: skip

# (field, algebra) -> {printed form: corrected form}
CORRECTIONS = {
    ("d3981", "ram-3"): {"x1+u0+v1": "x1+u0+u1+v1"},
    ("d4752", "ram-2"): {"x0-x1+x2-x3-2u0+2u1-8u2-7u3-v1+v1": "x0-x1+x2-x3-2u0+2u1-8u2-7u3-3v1"},
}


def corrected_congruences(key):
    scale, forms = PRINTED_CONGRUENCES[key]
    fixes = CORRECTIONS.get(key, {})
    return scale, [(fixes.get(t, t), m) for t, m in forms]
