"""Pure-Python dynamic-programming kernels for string distances.

Fallback used when the compiled extension (netrans._simdist_c) is not
available.  Both kernels run in O(len(a) * len(b)) time and O(min) memory.
"""


def lcs_length(a: str, b: str) -> int:
    """Length of the longest common subsequence of two strings."""
    if len(a) > len(b):
        a, b = b, a
    m = len(a)
    if m == 0:
        return 0
    prev = [0] * (m + 1)
    curr = [0] * (m + 1)
    for cb in b:
        for i in range(1, m + 1):
            if a[i - 1] == cb:
                curr[i] = prev[i - 1] + 1
            else:
                ci, pi = curr[i - 1], prev[i]
                curr[i] = ci if ci >= pi else pi
        prev, curr = curr, prev
    return prev[m]


def edit_distance_indel(a: str, b: str) -> int:
    """Minimal number of single-character insertions and deletions."""
    if len(a) > len(b):
        a, b = b, a
    m = len(a)
    if m == 0:
        return len(b)
    prev = list(range(m + 1))
    curr = [0] * (m + 1)
    for j, cb in enumerate(b, start=1):
        curr[0] = j
        for i in range(1, m + 1):
            if a[i - 1] == cb:
                curr[i] = prev[i - 1]
            else:
                ci, pi = curr[i - 1], prev[i]
                curr[i] = (ci if ci <= pi else pi) + 1
        prev, curr = curr, prev
    return prev[m]
