"""Closed forms used as independent references, computed straight from the
binary expansion."""

import re


def nu2(m):
    v = 0
    while m % 2 == 0:
        m //= 2
        v += 1
    return v


def b(n):
    return (-1) ** nu2(n + 1)


def c(n):
    blocks = re.findall("1+", bin(n)[2:]) if n else []
    return (-1) ** sum(1 for blk in blocks if len(blk) % 4 in (2, 3))
