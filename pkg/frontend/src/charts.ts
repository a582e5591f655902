// Minimal canvas line chart for per-generation best/mean fitness.

export interface ChartSeries {
  label: string;
  color: string;
  values: number[];
}

export function chartPoints(
  values: number[],
  width: number,
  height: number,
  pad = 24,
): [number, number][] {
  if (values.length === 0) return [];
  const n = values.length;
  const dx = n > 1 ? (width - 2 * pad) / (n - 1) : 0;
  return values.map((v, i) => [pad + i * dx, height - pad - v * (height - 2 * pad)]);
}

export function drawHistoryChart(
  ctx: CanvasRenderingContext2D,
  width: number,
  height: number,
  series: ChartSeries[],
): void {
  ctx.clearRect(0, 0, width, height);
  const pad = 24;
  ctx.strokeStyle = "#c8cdd4";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.fillStyle = "#6b7280";
  ctx.font = "10px sans-serif";
  ctx.fillText("1.0", 2, pad + 4);
  ctx.fillText("0.0", 2, height - pad + 4);
  for (const s of series) {
    const pts = chartPoints(s.values, width, height, pad);
    if (pts.length === 0) continue;
    ctx.beginPath();
    pts.forEach(([x, y], i) => (i === 0 ? ctx.moveTo(x, y) : ctx.lineTo(x, y)));
    ctx.strokeStyle = s.color;
    ctx.lineWidth = 1.5;
    ctx.stroke();
  }
  let lx = pad + 4;
  for (const s of series) {
    ctx.fillStyle = s.color;
    ctx.fillText(s.label, lx, 14);
    lx += ctx.measureText(s.label).width + 14;
  }
}
