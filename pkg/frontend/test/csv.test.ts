import { mkdtempSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { column, numericColumn, parseLine, readCsv } from "../src/csv";

function writeTmp(name: string, body: string): string {
  const dir = mkdtempSync(join(tmpdir(), "csv-"));
  const path = join(dir, name);
  writeFileSync(path, body, "utf-8");
  return path;
}

describe("parseLine", () => {
  it("splits plain fields", () => {
    expect(parseLine("a,b,c")).toEqual(["a", "b", "c"]);
  });

  it("keeps commas inside quotes", () => {
    expect(parseLine('state,"(0, 1, 2)",17')).toEqual(["state", "(0, 1, 2)", "17"]);
  });

  it("unescapes doubled quotes", () => {
    expect(parseLine('"say ""hi""",x')).toEqual(['say "hi"', "x"]);
  });
});

describe("readCsv", () => {
  it("separates comment lines", () => {
    const path = writeTmp("perm.csv", "# boundary: shift(1)\nx,sigma_x\n0.0,1.0\n");
    const { table, comments } = readCsv(path);
    expect(comments).toEqual(["# boundary: shift(1)"]);
    expect(table.header).toEqual(["x", "sigma_x"]);
    expect(table.rows).toEqual([["0.0", "1.0"]]);
  });

  it("rejects ragged rows", () => {
    const path = writeTmp("bad.csv", "a,b\n1\n");
    expect(() => readCsv(path)).toThrow(/header has 2/);
  });
});

describe("columns", () => {
  it("fails fast naming a missing column", () => {
    const path = writeTmp("t.csv", "a,b\n1,2\n");
    const { table } = readCsv(path);
    expect(() => column(table, "tv", path)).toThrow(/missing column 'tv'/);
  });

  it("parses numbers including inf", () => {
    const path = writeTmp("n.csv", "v\n1.5\ninf\n-inf\n");
    const { table } = readCsv(path);
    expect(numericColumn(table, "v", path)).toEqual([1.5, Infinity, -Infinity]);
  });

  it("rejects non-numeric cells", () => {
    const path = writeTmp("n.csv", "v\nhello\n");
    const { table } = readCsv(path);
    expect(() => numericColumn(table, "v", path)).toThrow(/not numeric/);
  });
});
