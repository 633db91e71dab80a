/**
 * Parsing and validation for the simulation CSV schemas.
 *
 * Two layouts exist, distinguished by their header row:
 *   scenario,epsilon,alpha,beta                            (offline curves)
 *   scenario,epsilon,alpha,beta1,beta2,no_alarm_fraction   (online curves)
 *
 * The epsilon column serializes the non-private baseline as the literal
 * token "inf"; an undefined conditional probability is the token "nan".
 */

export interface OfflinePoint {
  scenario: string;
  epsilon: number;
  alpha: number;
  beta: number;
}

export interface OnlinePoint {
  scenario: string;
  epsilon: number;
  alpha: number;
  beta1: number;
  beta2: number; // NaN when the conditioning set was empty
  noAlarmFraction: number;
}

export type CurveFile =
  | { kind: "offline"; rows: OfflinePoint[] }
  | { kind: "online"; rows: OnlinePoint[] };

const OFFLINE_HEADER = ["scenario", "epsilon", "alpha", "beta"];
const ONLINE_HEADER = ["scenario", "epsilon", "alpha", "beta1", "beta2", "no_alarm_fraction"];

export class SchemaError extends Error {
  readonly column: string;

  constructor(message: string, column: string) {
    super(message);
    this.name = "SchemaError";
    this.column = column;
  }
}

function checkHeader(cells: string[], source: string): "offline" | "online" {
  const expected = cells.length <= OFFLINE_HEADER.length ? OFFLINE_HEADER : ONLINE_HEADER;
  const width = Math.max(cells.length, expected.length);
  for (let i = 0; i < width; i++) {
    const got = cells[i];
    const want = expected[i];
    if (got === want) continue;
    const column = got ?? want ?? "?";
    if (got === undefined) {
      throw new SchemaError(`${source}: missing column "${want}"`, String(want));
    }
    throw new SchemaError(
      `${source}: unexpected column "${got}" (expected "${want ?? "end of header"}")`,
      column,
    );
  }
  return expected === OFFLINE_HEADER ? "offline" : "online";
}

function parseEpsilon(token: string, where: string): number {
  if (token === "inf") return Infinity;
  const value = Number(token);
  if (token === "" || Number.isNaN(value) || value <= 0) {
    throw new SchemaError(`${where}: bad epsilon value "${token}"`, "epsilon");
  }
  return value;
}

function parseNumber(token: string, column: string, where: string, allowNaN = false): number {
  if (allowNaN && token === "nan") return NaN;
  const value = Number(token);
  if (token === "" || Number.isNaN(value)) {
    throw new SchemaError(`${where}: bad ${column} value "${token}"`, column);
  }
  return value;
}

export function parseCurveFile(text: string, source = "<input>"): CurveFile {
  const lines = text.split("\n").filter((line) => line.trim() !== "");
  if (lines.length === 0) {
    throw new SchemaError(`${source}: file is empty`, "scenario");
  }
  const kind = checkHeader((lines[0] as string).split(","), source);
  const headerLen = kind === "offline" ? OFFLINE_HEADER.length : ONLINE_HEADER.length;

  const offline: OfflinePoint[] = [];
  const online: OnlinePoint[] = [];
  for (let i = 1; i < lines.length; i++) {
    const where = `${source}:${i + 1}`;
    const cells = (lines[i] as string).split(",");
    if (cells.length !== headerLen) {
      throw new SchemaError(
        `${where}: expected ${headerLen} fields, found ${cells.length}`,
        "row",
      );
    }
    const scenario = cells[0] as string;
    const epsilon = parseEpsilon(cells[1] as string, where);
    const alpha = parseNumber(cells[2] as string, "alpha", where);
    if (kind === "offline") {
      offline.push({ scenario, epsilon, alpha, beta: parseNumber(cells[3] as string, "beta", where) });
    } else {
      online.push({
        scenario,
        epsilon,
        alpha,
        beta1: parseNumber(cells[3] as string, "beta1", where),
        beta2: parseNumber(cells[4] as string, "beta2", where, true),
        noAlarmFraction: parseNumber(cells[5] as string, "no_alarm_fraction", where),
      });
    }
  }
  return kind === "offline" ? { kind, rows: offline } : { kind, rows: online };
}

/** Human label for an epsilon value; infinity is the non-private baseline. */
export function epsilonLabel(epsilon: number): string {
  return Number.isFinite(epsilon) ? `ε = ${epsilon}` : "non-private (ε = ∞)";
}
