import { readFileSync } from "fs";

export interface Table {
  columns: string[];
  rows: string[][];
}

/** Minimal RFC-4180 reader: quoted fields, CRLF or LF line ends. */
export function parseCsv(text: string): Table {
  const rows: string[][] = [];
  let field = "";
  let row: string[] = [];
  let inQuotes = false;
  for (let i = 0; i < text.length; i++) {
    const c = text[i];
    if (inQuotes) {
      if (c === '"') {
        if (text[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          inQuotes = false;
        }
      } else {
        field += c;
      }
    } else if (c === '"') {
      inQuotes = true;
    } else if (c === ",") {
      row.push(field);
      field = "";
    } else if (c === "\n" || c === "\r") {
      if (c === "\r" && text[i + 1] === "\n") i++;
      row.push(field);
      field = "";
      rows.push(row);
      row = [];
    } else {
      field += c;
    }
  }
  if (field.length > 0 || row.length > 0) {
    row.push(field);
    rows.push(row);
  }
  const nonEmpty = rows.filter((r) => r.length > 1 || r[0] !== "");
  if (nonEmpty.length === 0) {
    throw new SchemaError("empty CSV: no header row");
  }
  return { columns: nonEmpty[0], rows: nonEmpty.slice(1) };
}

export class SchemaError extends Error {}

export function loadTable(path: string, required: string[]): Table & {
  col: (name: string) => number[];
} {
  const table = parseCsv(readFileSync(path, "utf8"));
  const missing = required.filter((c) => !table.columns.includes(c));
  if (missing.length > 0) {
    throw new SchemaError(
      `${path}: missing required column(s): ${missing.join(", ")}`
    );
  }
  if (table.rows.length === 0) {
    throw new SchemaError(`${path}: no data rows`);
  }
  const col = (name: string): number[] => {
    const idx = table.columns.indexOf(name);
    return table.rows.map((r) => Number(r[idx]));
  };
  return { ...table, col };
}
