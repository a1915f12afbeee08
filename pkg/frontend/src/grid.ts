/** Grid geometry for the 8x8 picker.
 *
 * Ordinals encode row*8 + col. Column is the attitude axis (left to right,
 * negative to positive); row is the energy axis and increases UPWARD, so the
 * top-left rendered cell is ordinal 56 (col 0, row 7) and the bottom-right
 * is 7 (col 7, row 0).
 */

export const GRID_SIZE = 8;
export const CELL_COUNT = GRID_SIZE * GRID_SIZE;

export interface Cell {
  col: number;
  row: number;
}

export function isValidOrdinal(n: number): boolean {
  return Number.isInteger(n) && n >= 0 && n < CELL_COUNT;
}

export function toCell(ordinal: number): Cell {
  if (!isValidOrdinal(ordinal)) throw new RangeError(`ordinal out of range: ${ordinal}`);
  return { col: ordinal % GRID_SIZE, row: Math.floor(ordinal / GRID_SIZE) };
}

export function toOrdinal(cell: Cell): number {
  if (
    !Number.isInteger(cell.col) || !Number.isInteger(cell.row) ||
    cell.col < 0 || cell.col >= GRID_SIZE || cell.row < 0 || cell.row >= GRID_SIZE
  ) {
    throw new RangeError(`cell out of range: ${cell.col},${cell.row}`);
  }
  return cell.row * GRID_SIZE + cell.col;
}

/** Ordinals in render order: top row first (energy 7), left to right. */
export function layoutRows(): number[][] {
  const rows: number[][] = [];
  for (let row = GRID_SIZE - 1; row >= 0; row--) {
    const line: number[] = [];
    for (let col = 0; col < GRID_SIZE; col++) line.push(toOrdinal({ col, row }));
    rows.push(line);
  }
  return rows;
}

export type ArrowKey = "ArrowUp" | "ArrowDown" | "ArrowLeft" | "ArrowRight";

/** Keyboard navigation: arrows move within the grid and clamp at the edges.
 * Up means more energy (higher row). */
export function moveSelection(current: number, key: ArrowKey): number {
  const { col, row } = toCell(current);
  switch (key) {
    case "ArrowUp":
      return toOrdinal({ col, row: Math.min(row + 1, GRID_SIZE - 1) });
    case "ArrowDown":
      return toOrdinal({ col, row: Math.max(row - 1, 0) });
    case "ArrowLeft":
      return toOrdinal({ col: Math.max(col - 1, 0), row });
    case "ArrowRight":
      return toOrdinal({ col: Math.min(col + 1, GRID_SIZE - 1), row });
  }
}

/** Highlight ranks per ordinal (1 = top candidate). Out-of-range ordinals are
 * rejected here, before anything reaches the DOM. */
export function highlightRanks(ordinals: number[]): Map<number, number> {
  const ranks = new Map<number, number>();
  ordinals.forEach((ordinal, i) => {
    if (!isValidOrdinal(ordinal)) throw new RangeError(`highlight out of range: ${ordinal}`);
    if (!ranks.has(ordinal)) ranks.set(ordinal, i + 1);
  });
  return ranks;
}
