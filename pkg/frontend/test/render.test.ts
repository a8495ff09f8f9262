import { inflateSync } from "zlib";
import { mkdtempSync, readdirSync, readFileSync, statSync, writeFileSync } from "fs";
import { tmpdir } from "os";
import { join } from "path";
import { describe, expect, it } from "vitest";

import { buildBins, fmt, niceTicks, renderPng, renderSvg } from "../src/figure";
import { glyphRows } from "../src/font5x7";
import { encodePng } from "../src/png";
import { main, renderDirectory, specForCsv } from "../src/report";

const FIXTURES = join(__dirname, "fixtures");

function tmp(): string {
  return mkdtempSync(join(tmpdir(), "render-"));
}

describe("font", () => {
  it("renders the expected A glyph", () => {
    const rows = glyphRows("A").map((r) => r.toString(2).padStart(5, "0"));
    expect(rows).toEqual([
      "01110", "10001", "10001", "11111", "10001", "10001", "10001",
    ]);
  });

  it("falls back to a box for unknown glyphs", () => {
    expect(glyphRows("é")[0]).toBe(0b11111);
  });
});

describe("png encoder", () => {
  it("emits a decodable image with the right dimensions", () => {
    const png = encodePng(3, 2, new Uint8Array(18).fill(200));
    expect(png.subarray(0, 8)).toEqual(
      Buffer.from([0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a]),
    );
    expect(png.readUInt32BE(16)).toBe(3);
    expect(png.readUInt32BE(20)).toBe(2);
    // IDAT payload inflates to filter byte + 9 bytes per row
    const idatLen = png.readUInt32BE(33);
    const idat = png.subarray(41, 41 + idatLen);
    const raw = inflateSync(idat);
    expect(raw.length).toBe(2 * (1 + 9));
  });

  it("rejects wrong buffer sizes", () => {
    expect(() => encodePng(2, 2, new Uint8Array(5))).toThrow(/expected 12/);
  });
});

describe("layout helpers", () => {
  it("nice ticks cover the range at round steps", () => {
    expect(niceTicks(0, 1)).toEqual([0, 0.2, 0.4, 0.6000000000000001, 0.8, 1]);
    expect(niceTicks(0, 10)).toEqual([0, 2, 4, 6, 8, 10]);
  });

  it("fmt is stable and trims zeros", () => {
    expect(fmt(0.25)).toBe("0.25");
    expect(fmt(192)).toBe("192");
    expect(fmt(1e-7)).toBe("1e-7");
  });

  it("bins cover all values", () => {
    const bins = buildBins([0, 1, 2, 3, 4, 5]);
    const total = bins.reduce((a, b) => a + b.height, 0);
    expect(total).toBe(6);
  });
});

describe("figure rendering", () => {
  const spec = {
    kind: "curve" as const,
    title: "tv scan",
    xLabel: "volume pair",
    yLabel: "total variation",
    points: [
      { x: 1, y: 0.5, err: 0.05 },
      { x: 2, y: 0.2, err: 0.02 },
      { x: 3, y: 0.1, err: 0.01 },
    ],
  };

  it("produces svg with error bars and a path", () => {
    const svg = renderSvg(spec);
    expect(svg).toContain("<svg");
    expect(svg).toContain("tv scan");
    expect(svg.match(/<circle/g)?.length).toBe(3);
    expect(svg).toContain("<path");
  });

  it("is deterministic", () => {
    expect(renderSvg(spec)).toBe(renderSvg(spec));
    expect(renderPng(spec).equals(renderPng(spec))).toBe(true);
  });

  it("rejects empty data", () => {
    expect(() => renderSvg({ ...spec, points: [] })).toThrow(/no data points/);
  });
});

describe("csv to figure mapping", () => {
  it("maps every fixture schema", () => {
    expect(specForCsv(join(FIXTURES, "points.csv"))!.kind).toBe("histogram");
    expect(specForCsv(join(FIXTURES, "table.csv"))!.kind).toBe("histogram");
    expect(specForCsv(join(FIXTURES, "empirical.csv"))!.kind).toBe("curve");
    expect(specForCsv(join(FIXTURES, "report.csv"))!.kind).toBe("scatter");
    expect(specForCsv(join(FIXTURES, "scan.csv"))!.kind).toBe("curve");
    expect(specForCsv(join(FIXTURES, "manifest.csv"))).toBeNull();
  });

  it("rejects unknown schemas", () => {
    const dir = tmp();
    const path = join(dir, "odd.csv");
    writeFileSync(path, "foo,bar\n1,2\n");
    expect(() => specForCsv(path)).toThrow(/unrecognized CSV schema/);
  });

  it("names the missing column on schema mismatch", () => {
    const dir = tmp();
    const path = join(dir, "scan.csv");
    writeFileSync(path, "pair,stderr,exact,support\n\"a\",0.1,true,5\n");
    expect(() => specForCsv(path)).toThrow(/missing column 'tv'/);
  });
});

describe("directory rendering", () => {
  it("renders all acceptance CSVs to svg and png, skipping the manifest", () => {
    const out = tmp();
    const result = renderDirectory(FIXTURES, out);
    expect(result.errors).toEqual([]);
    expect(result.skipped).toEqual(["manifest.csv"]);
    expect(result.rendered.sort()).toEqual(
      ["empirical.csv", "points.csv", "report.csv", "scan.csv", "table.csv"]);
    const produced = readdirSync(out).sort();
    expect(produced).toEqual([
      "empirical.png", "empirical.svg", "points.png", "points.svg",
      "report.png", "report.svg", "scan.png", "scan.svg",
      "table.png", "table.svg",
    ]);
    for (const f of produced) {
      expect(statSync(join(out, f)).size).toBeGreaterThan(100);
    }
  });

  it("re-render is byte-stable", () => {
    const out1 = tmp();
    const out2 = tmp();
    renderDirectory(FIXTURES, out1);
    renderDirectory(FIXTURES, out2);
    for (const f of readdirSync(out1)) {
      expect(readFileSync(join(out1, f)).equals(readFileSync(join(out2, f))),
             `${f} differs between renders`).toBe(true);
    }
  });

  it("does not mutate its inputs", () => {
    const before = new Map(
      readdirSync(FIXTURES).map((f) => [f, readFileSync(join(FIXTURES, f))]));
    renderDirectory(FIXTURES, tmp());
    for (const [f, buf] of before) {
      expect(readFileSync(join(FIXTURES, f)).equals(buf)).toBe(true);
    }
  });

  it("errors on an empty-input CSV and writes nothing for it", () => {
    const dir = tmp();
    writeFileSync(join(dir, "scan.csv"), "pair,tv,stderr,exact,support\n");
    const out = tmp();
    const result = renderDirectory(dir, out);
    expect(result.errors.length).toBe(1);
    expect(result.errors[0]).toMatch(/empty scan/);
    expect(readdirSync(out)).toEqual([]);
  });

  it("cli exits 0 on success and 1 on schema errors", () => {
    expect(main(["--in", FIXTURES, "--out", tmp()])).toBe(0);
    const dir = tmp();
    writeFileSync(join(dir, "odd.csv"), "foo\n1\n");
    expect(main(["--in", dir, "--out", tmp()])).toBe(1);
    expect(main(["--in", FIXTURES])).toBe(2);
  });
});
