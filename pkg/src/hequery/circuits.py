"""Balanced product circuits shared by both protocols.

Products are taken pairwise in a balanced tree so the multiplicative depth
of ``k`` factors is ``ceil(log2 k)`` instead of ``k - 1``; the number of
multiplications is unchanged.
"""


def tree_product(items, mul):
    items = list(items)
    if not items:
        raise ValueError("empty product")
    while len(items) > 1:
        nxt = [mul(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


def all_but_one_products(items, mul):
    """``out[k] = prod(items[j] for j != k)``, with ``None`` for an empty product.

    Builds a product tree (up-sweep), then pushes "everything outside this
    subtree" down to the leaves. About 3k multiplications and depth about
    2 log2 k, instead of k(k-2) multiplications for the direct form.
    """
    items = list(items)
    n = len(items)
    if n == 0:
        return []

    def times(a, b):
        if a is None:
            return b
        if b is None:
            return a
        return mul(a, b)

    def build(lo, hi):
        if hi - lo == 1:
            return (items[lo], lo, hi, None, None)
        mid = (lo + hi) // 2
        left, right = build(lo, mid), build(mid, hi)
        return (mul(left[0], right[0]), lo, hi, left, right)

    out = [None] * n

    def push(node, outside):
        _, lo, hi, left, right = node
        if left is None:
            out[lo] = outside
            return
        push(left, times(outside, right[0]))
        push(right, times(outside, left[0]))

    push(build(0, n), None)
    return out
