# Exhaustive CART oracle with exact rational arithmetic; emits the text dump
# format used by RegressionTree::dump.
# Usage: python3 tools/tie_tree.py > fixtures/predict/tie_tree.txt
from fractions import Fraction as F
import sys

X = [
    [1, 8, 5], [2, 7, 5], [3, 6, 5], [4, 5, 5], [5, 4, 5],
    [6, 3, 5], [7, 2, 5], [8, 1, 5], [2, 7, 5], [7, 2, 5],
]
Y = [0, 3, 3, 0, 0, 3, 3, 0, 1, 2]
NAMES = ["a", "b", "c"]

def sse(ys):
    if not ys: return F(0)
    m = F(sum(ys), len(ys))
    return sum((F(y) - m) ** 2 for y in ys)

def fmt(v):
    s = repr(float(v))
    return s[:-2] if s.endswith(".0") else s

def build(rows, depth, out, max_depth=20):
    ys = [Y[i] for i in rows]
    mean = F(sum(ys), len(ys))
    pad = "  " * depth
    if depth >= max_depth or len(set(ys)) == 1:
        out.append(f"{pad}leaf {fmt(sum(ys) / len(ys))} (n={len(ys)})"); return
    best = None
    for f in range(len(X[0])):
        vals = sorted(set(X[i][f] for i in rows))
        for a, b in zip(vals, vals[1:]):
            t = F(a + b, 2)
            l = [Y[i] for i in rows if X[i][f] <= t]
            r = [Y[i] for i in rows if X[i][f] > t]
            cost = sse(l) + sse(r)
            if best is None or cost < best[0]:
                best = (cost, f, t)
    if best is None:
        out.append(f"{pad}leaf {fmt(sum(ys) / len(ys))} (n={len(ys)})"); return
    _, f, t = best
    out.append(f"{pad}{NAMES[f]} <= {fmt(t)}")
    build([i for i in rows if X[i][f] <= t], depth + 1, out)
    build([i for i in rows if X[i][f] > t], depth + 1, out)

out = []
build(list(range(len(X))), 0, out)
sys.stdout.write("\n".join(out) + "\n")
