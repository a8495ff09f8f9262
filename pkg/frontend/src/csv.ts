import { readFileSync } from "fs";

export interface Table {
  header: string[];
  rows: string[][];
}

/** Parse one CSV line honoring double-quoted fields (commas inside quotes). */
export function parseLine(line: string): string[] {
  const out: string[] = [];
  let field = "";
  let quoted = false;
  for (let i = 0; i < line.length; i++) {
    const ch = line[i];
    if (quoted) {
      if (ch === '"') {
        if (line[i + 1] === '"') {
          field += '"';
          i++;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
    } else if (ch === '"') {
      quoted = true;
    } else if (ch === ",") {
      out.push(field);
      field = "";
    } else {
      field += ch;
    }
  }
  out.push(field);
  return out;
}

/** Read a CSV file; leading '#' comment lines are collected separately. */
export function readCsv(path: string): { table: Table; comments: string[] } {
  const text = readFileSync(path, "utf-8");
  const lines = text.split("\n").filter((l) => l.length > 0);
  const comments = lines.filter((l) => l.startsWith("#"));
  const data = lines.filter((l) => !l.startsWith("#"));
  if (data.length === 0) {
    throw new Error(`${path}: no header line`);
  }
  const header = parseLine(data[0]);
  const rows = data.slice(1).map(parseLine);
  for (const row of rows) {
    if (row.length !== header.length) {
      throw new Error(
        `${path}: row has ${row.length} fields, header has ${header.length}`,
      );
    }
  }
  return { table: { header, rows }, comments };
}

/** Column accessor that fails fast naming the missing column. */
export function column(table: Table, name: string, path: string): string[] {
  const idx = table.header.indexOf(name);
  if (idx < 0) {
    throw new Error(`${path}: missing column '${name}' (header: ${table.header.join(",")})`);
  }
  return table.rows.map((r) => r[idx]);
}

export function numericColumn(table: Table, name: string, path: string): number[] {
  return column(table, name, path).map((v, i) => {
    const x = v === "inf" ? Infinity : v === "-inf" ? -Infinity : Number(v);
    if (Number.isNaN(x) && v !== "nan") {
      throw new Error(`${path}: column '${name}' row ${i + 1} is not numeric: '${v}'`);
    }
    return x;
  });
}
