"""Shared test helpers and independent brute-force oracles."""

from __future__ import annotations

from reviewminer.corpus import ReviewDocument


def make_doc(
    tokens,
    id="doc",
    category="cat",
    brand="brand",
    tag="test",
    polarity=None,
) -> ReviewDocument:
    return ReviewDocument(
        id=id,
        text=" ".join(tokens),
        tokens=tuple(tokens),
        category=category,
        brand=brand,
        corpus_tag=tag,
        gold_polarity=polarity,
    )


def brute_chi_square(a, b, c, d):
    """Observed-vs-expected chi-square from cell frequencies."""
    n = a + b + c + d
    observed = [[a, b], [c, d]]
    row = [a + b, c + d]
    col = [a + c, b + d]
    if 0 in row or 0 in col:
        return 0.0
    total = 0.0
    for i in range(2):
        for j in range(2):
            expected = row[i] * col[j] / n
            total += (observed[i][j] - expected) ** 2 / expected
    return total


def brute_aspect_signal(tokens, alias_seqs, lex):
    """Enumerate every (sentiment word, aspect occurrence) pair explicitly."""
    occurrences = []
    for alias in alias_seqs:
        span = len(alias)
        for start in range(len(tokens) - span + 1):
            if tuple(tokens[start : start + span]) == alias:
                occurrences.append(list(range(start, start + span)))
    if not occurrences:
        return None
    total = 0.0
    for i, token in enumerate(tokens):
        if token not in lex:
            continue
        best = None
        for occ in occurrences:
            for j in occ:
                dist = abs(i - j)
                if best is None or dist < best:
                    best = dist
        total += lex[token] / max(1, best)
    return total


def separable_by_halfspace(points, labels):
    """Exhaustive strict-separability check for small 2D integer point sets.

    If the class hulls are disjoint, the max-margin direction is either a
    cross-class point difference (vertex-vertex) or the normal of some point
    difference (vertex-edge / edge-edge), so checking projections along every
    such candidate direction is exact.
    """
    pos = [p for p, y in zip(points, labels) if y > 0]
    neg = [p for p, y in zip(points, labels) if y < 0]
    candidates = []
    all_pts = pos + neg
    for i in range(len(all_pts)):
        for j in range(i + 1, len(all_pts)):
            dx = all_pts[i][0] - all_pts[j][0]
            dy = all_pts[i][1] - all_pts[j][1]
            if dx == 0 and dy == 0:
                continue
            candidates.append((dx, dy))
            candidates.append((-dy, dx))
    for d in candidates:
        proj_pos = [p[0] * d[0] + p[1] * d[1] for p in pos]
        proj_neg = [p[0] * d[0] + p[1] * d[1] for p in neg]
        if max(proj_pos) < min(proj_neg) or max(proj_neg) < min(proj_pos):
            return True
    return False
