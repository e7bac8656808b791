"""Pure-Python twin of the compiled vector kernels.

Same contract as ``flowspace._kernels._speedups``: every function takes
and returns flat tuples of non-negative ints, with per-slot moduli given
as bitmasks (2**width - 1, width <= 64).
"""


def translate(values, deltas, masks):
    """Per-slot modular addition: (v_i + d_i) mod 2**w_i."""
    return tuple((v + d) & m for v, d, m in zip(values, deltas, masks))


def compose(second_linear, second_translation, first_linear, first_translation, masks):
    """Affine composition: apply `first`, then `second`.

    Diagonals multiply pointwise; the translation of the composite is
    second.linear * first.translation + second.translation, per slot.
    """
    lin = tuple(a & b for a, b in zip(second_linear, first_linear))
    tr = tuple(
        (sl * ft + st) & m
        for sl, st, ft, m in zip(second_linear, second_translation, first_translation, masks)
    )
    return lin, tr


def apply(linear, translation, state, masks):
    """Apply a diagonal-plus-translation map to a state vector."""
    return tuple((l * s + t) & m for l, s, t, m in zip(linear, state, translation, masks))


def negate(translation, masks):
    """Slotwise additive inverse: (-t_i) mod 2**w_i."""
    return tuple((m + 1 - t) & m for t, m in zip(translation, masks))


def is_identity(linear, translation):
    return all(l == 1 for l in linear) and all(t == 0 for t in translation)


def inverse_pairs(linears, translations, masks):
    """All index pairs i < j whose composed maps are the identity.

    A pair can only compose to the identity when both diagonals are
    all-ones and the translations cancel slotwise.
    """
    invertible = [all(lin) for lin in linears]
    out = []
    for i in range(len(linears)):
        if not invertible[i]:
            continue
        ti = translations[i]
        for j in range(i + 1, len(linears)):
            if not invertible[j]:
                continue
            tj = translations[j]
            if all((a + b) & m == 0 for a, b, m in zip(ti, tj, masks)):
                out.append((i, j))
    return out
