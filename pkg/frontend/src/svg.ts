/**
 * Minimal deterministic SVG line charts: no DOM, no runtime dependencies,
 * identical input always yields the identical SVG string.
 */

export interface Series {
  label: string;
  points: Array<[number, number]>; // NaN-free; callers filter undefined values
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
}

const WIDTH = 720;
const HEIGHT = 440;
const MARGIN = { top: 44, right: 200, bottom: 52, left: 64 };
const PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"];

const plotW = WIDTH - MARGIN.left - MARGIN.right;
const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;

function fmt(value: number): string {
  return Number(value.toFixed(2)).toString();
}

function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function xTicks(maxX: number): number[] {
  if (maxX <= 0) return [0, 1];
  const rawStep = maxX / 5;
  const magnitude = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * magnitude).find((s) => s >= rawStep) ?? rawStep;
  const ticks: number[] = [];
  for (let t = 0; t <= maxX + 1e-9; t += step) ticks.push(t);
  return ticks;
}

export function renderLineChart(spec: ChartSpec): string {
  const maxX = Math.max(1, ...spec.series.flatMap((s) => s.points.map((p) => p[0])));
  const x = (v: number) => MARGIN.left + (v / maxX) * plotW;
  const y = (v: number) => MARGIN.top + (1 - Math.min(Math.max(v, 0), 1)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="white"/>`);
  parts.push(
    `<text class="title" x="${MARGIN.left}" y="24" font-size="15">${escapeXml(spec.title)}</text>`,
  );

  // axes and grid
  const x0 = MARGIN.left;
  const y0 = MARGIN.top + plotH;
  parts.push(`<g class="axes" stroke="#333" stroke-width="1">`);
  parts.push(`<line x1="${x0}" y1="${y0}" x2="${x0 + plotW}" y2="${y0}"/>`);
  parts.push(`<line x1="${x0}" y1="${MARGIN.top}" x2="${x0}" y2="${y0}"/>`);
  parts.push(`</g>`);

  parts.push(`<g class="ticks" font-size="11" fill="#333">`);
  for (const t of xTicks(maxX)) {
    const px = x(t);
    parts.push(`<line x1="${fmt(px)}" y1="${y0}" x2="${fmt(px)}" y2="${y0 + 4}" stroke="#333"/>`);
    parts.push(`<text x="${fmt(px)}" y="${y0 + 18}" text-anchor="middle">${fmt(t)}</text>`);
  }
  for (const t of [0, 0.25, 0.5, 0.75, 1]) {
    const py = y(t);
    parts.push(`<line x1="${x0 - 4}" y1="${fmt(py)}" x2="${x0}" y2="${fmt(py)}" stroke="#333"/>`);
    parts.push(
      `<line x1="${x0}" y1="${fmt(py)}" x2="${x0 + plotW}" y2="${fmt(py)}" stroke="#eee"/>`,
    );
    parts.push(`<text x="${x0 - 8}" y="${fmt(py + 4)}" text-anchor="end">${fmt(t)}</text>`);
  }
  parts.push(`</g>`);

  parts.push(
    `<text class="x-label" x="${x0 + plotW / 2}" y="${HEIGHT - 12}" text-anchor="middle" ` +
      `font-size="13">${escapeXml(spec.xLabel)}</text>`,
  );
  parts.push(
    `<text class="y-label" x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" ` +
      `font-size="13" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">` +
      `${escapeXml(spec.yLabel)}</text>`,
  );

  spec.series.forEach((series, idx) => {
    const color = PALETTE[idx % PALETTE.length];
    if (series.points.length > 0) {
      const d = series.points
        .map(([px, py], i) => `${i === 0 ? "M" : "L"}${fmt(x(px))},${fmt(y(py))}`)
        .join(" ");
      parts.push(
        `<path class="curve" d="${d}" fill="none" stroke="${color}" stroke-width="1.8"/>`,
      );
    }
    const ly = MARGIN.top + 14 + idx * 20;
    const lx = MARGIN.left + plotW + 16;
    parts.push(`<g class="legend-entry">`);
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"/>`,
    );
    parts.push(`<text x="${lx + 28}" y="${ly}" font-size="12">${escapeXml(series.label)}</text>`);
    parts.push(`</g>`);
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
