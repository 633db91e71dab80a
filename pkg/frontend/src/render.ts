/**
 * Turn parsed curve files into figures: one image per (scenario, metric),
 * one curve per epsilon, legend labelled by epsilon with infinity shown as
 * the non-private baseline.
 */

import { CurveFile, OfflinePoint, OnlinePoint, epsilonLabel } from "./csv.js";
import { renderLineChart } from "./svg.js";

export interface RenderedImage {
  filename: string;
  svg: string;
}

function safeName(scenario: string): string {
  return scenario.replace(/[^A-Za-z0-9_-]+/g, "-") || "scenario";
}

function groupBy<T>(items: T[], key: (item: T) => string): Map<string, T[]> {
  const groups = new Map<string, T[]>();
  for (const item of items) {
    const k = key(item);
    const bucket = groups.get(k);
    if (bucket) bucket.push(item);
    else groups.set(k, [item]);
  }
  return groups;
}

function epsilonOrder(values: number[]): number[] {
  // finite budgets ascending, the non-private baseline last
  const unique = [...new Set(values)];
  return unique.sort((a, b) => {
    if (Number.isFinite(a) && Number.isFinite(b)) return a - b;
    return Number.isFinite(a) ? -1 : 1;
  });
}

function series<T extends { epsilon: number; alpha: number }>(
  rows: T[],
  value: (row: T) => number,
): { label: string; points: Array<[number, number]> }[] {
  const byEps = groupBy(rows, (r) => String(r.epsilon));
  return epsilonOrder(rows.map((r) => r.epsilon)).map((eps) => {
    const points = (byEps.get(String(eps)) ?? [])
      .slice()
      .sort((a, b) => a.alpha - b.alpha)
      .map((r): [number, number] => [r.alpha, value(r)])
      .filter(([, v]) => !Number.isNaN(v)); // undefined conditionals are skipped
    return { label: epsilonLabel(eps), points };
  });
}

export function renderCurveFile(file: CurveFile): RenderedImage[] {
  const images: RenderedImage[] = [];
  if (file.kind === "offline") {
    for (const [scenario, rows] of groupBy(file.rows, (r: OfflinePoint) => r.scenario)) {
      images.push({
        filename: `${safeName(scenario)}_beta.svg`,
        svg: renderLineChart({
          title: `${scenario}: estimation failure probability`,
          xLabel: "alpha (allowed estimation error)",
          yLabel: "beta",
          series: series(rows, (r) => r.beta),
        }),
      });
    }
    return images;
  }
  for (const [scenario, rows] of groupBy(file.rows, (r: OnlinePoint) => r.scenario)) {
    images.push({
      filename: `${safeName(scenario)}_beta1.svg`,
      svg: renderLineChart({
        title: `${scenario}: estimation failure or wrong-window alarm`,
        xLabel: "alpha (allowed estimation error)",
        yLabel: "beta1",
        series: series(rows, (r) => r.beta1),
      }),
    });
    images.push({
      filename: `${safeName(scenario)}_beta2.svg`,
      svg: renderLineChart({
        title: `${scenario}: failure probability given a correct alarm window`,
        xLabel: "alpha (allowed estimation error)",
        yLabel: "beta2",
        series: series(rows, (r) => r.beta2),
      }),
    });
  }
  return images;
}
