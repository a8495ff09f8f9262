import { encodePng } from "./png";
import { GLYPH_HEIGHT, GLYPH_SPACING, GLYPH_WIDTH, glyphRows } from "./font5x7";

export type Rgb = [number, number, number];

export const BLACK: Rgb = [0, 0, 0];
export const WHITE: Rgb = [255, 255, 255];
export const GREY: Rgb = [170, 170, 170];
export const BLUE: Rgb = [54, 101, 163];
export const FILL: Rgb = [134, 167, 210];

/** A fixed-size RGB pixel buffer with the few primitives the plots need. */
export class Canvas {
  readonly width: number;
  readonly height: number;
  private readonly px: Uint8Array;

  constructor(width: number, height: number, background: Rgb = WHITE) {
    this.width = width;
    this.height = height;
    this.px = new Uint8Array(width * height * 3);
    for (let i = 0; i < width * height; i++) {
      this.px[3 * i] = background[0];
      this.px[3 * i + 1] = background[1];
      this.px[3 * i + 2] = background[2];
    }
  }

  set(x: number, y: number, c: Rgb): void {
    const xi = Math.round(x);
    const yi = Math.round(y);
    if (xi < 0 || yi < 0 || xi >= this.width || yi >= this.height) return;
    const o = 3 * (yi * this.width + xi);
    this.px[o] = c[0];
    this.px[o + 1] = c[1];
    this.px[o + 2] = c[2];
  }

  fillRect(x0: number, y0: number, x1: number, y1: number, c: Rgb): void {
    const [xa, xb] = x0 <= x1 ? [x0, x1] : [x1, x0];
    const [ya, yb] = y0 <= y1 ? [y0, y1] : [y1, y0];
    for (let y = Math.round(ya); y <= Math.round(yb); y++) {
      for (let x = Math.round(xa); x <= Math.round(xb); x++) {
        this.set(x, y, c);
      }
    }
  }

  line(x0: number, y0: number, x1: number, y1: number, c: Rgb): void {
    let xa = Math.round(x0);
    let ya = Math.round(y0);
    const xb = Math.round(x1);
    const yb = Math.round(y1);
    const dx = Math.abs(xb - xa);
    const dy = -Math.abs(yb - ya);
    const sx = xa < xb ? 1 : -1;
    const sy = ya < yb ? 1 : -1;
    let err = dx + dy;
    for (;;) {
      this.set(xa, ya, c);
      if (xa === xb && ya === yb) break;
      const e2 = 2 * err;
      if (e2 >= dy) {
        err += dy;
        xa += sx;
      }
      if (e2 <= dx) {
        err += dx;
        ya += sy;
      }
    }
  }

  /** Filled disc for scatter markers. */
  disc(cx: number, cy: number, r: number, c: Rgb): void {
    for (let y = -r; y <= r; y++) {
      for (let x = -r; x <= r; x++) {
        if (x * x + y * y <= r * r) this.set(cx + x, cy + y, c);
      }
    }
  }

  /** Draw text with the 5x7 font; (x, y) is the top-left corner. */
  text(x: number, y: number, s: string, c: Rgb, scale = 1): void {
    let cx = Math.round(x);
    for (const ch of s) {
      const rows = glyphRows(ch);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let b = 0; b < GLYPH_WIDTH; b++) {
          if ((rows[r] >> (GLYPH_WIDTH - 1 - b)) & 1) {
            this.fillRect(
              cx + b * scale,
              y + r * scale,
              cx + b * scale + scale - 1,
              y + r * scale + scale - 1,
              c,
            );
          }
        }
      }
      cx += (GLYPH_WIDTH + GLYPH_SPACING) * scale;
    }
  }

  /** Vertical text running upward; (x, y) anchors the first glyph's bottom row. */
  textUp(x: number, y: number, s: string, c: Rgb, scale = 1): void {
    let cy = Math.round(y);
    for (const ch of s) {
      const rows = glyphRows(ch);
      for (let r = 0; r < GLYPH_HEIGHT; r++) {
        for (let b = 0; b < GLYPH_WIDTH; b++) {
          if ((rows[r] >> (GLYPH_WIDTH - 1 - b)) & 1) {
            // rotate 90 degrees counterclockwise
            this.fillRect(
              x + r * scale,
              cy - b * scale,
              x + r * scale + scale - 1,
              cy - b * scale + scale - 1,
              c,
            );
          }
        }
      }
      cy -= (GLYPH_WIDTH + GLYPH_SPACING) * scale;
    }
  }

  toPng(): Buffer {
    return encodePng(this.width, this.height, this.px);
  }
}
