"""Headless SVG rendering of brick-chain designs."""

from __future__ import annotations

from typing import Optional

from .shapes import BrickChain, chain_vertices


def chain_to_svg(chain: Optional[BrickChain], title: str = "", pad: float = 0.5) -> str:
    """Standalone SVG of the chain's brick rectangles (y axis flipped up)."""
    if chain is None:
        return (
            '<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 10 10">'
            '<text x="1" y="5" font-size="1">(empty chain)</text></svg>'
        )
    rects = chain_vertices(chain)
    xs = [float(v[0]) for r in rects for v in r]
    ys = [float(v[1]) for r in rects for v in r]
    x0, x1 = min(xs) - pad, max(xs) + pad
    y0, y1 = min(ys) - pad, max(ys) + pad
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{x0:.3f} {-y1:.3f} '
        f'{x1 - x0:.3f} {y1 - y0:.3f}">'
    ]
    if title:
        parts.append(f"<title>{title}</title>")
    for rect in rects:
        pts = " ".join(f"{float(x):.4f},{-float(y):.4f}" for x, y in rect)
        parts.append(
            f'<polygon points="{pts}" fill="#4a90d9" fill-opacity="0.8" '
            'stroke="#1d3f5e" stroke-width="0.03"/>'
        )
    ax, ay = chain.anchor
    parts.append(f'<circle cx="{ax:.4f}" cy="{-ay:.4f}" r="0.08" fill="#d94a4a"/>')
    parts.append("</svg>")
    return "\n".join(parts)
