/**
 * English and tree annotations regenerated from attribute tuples, matching
 * the generator's grammar byte for byte.
 */

export type Tree = string | Tree[];

const PREPS = ["above", "right-of"];

function color(c: number): string {
  return `color${c}`;
}

function shape(t: number): string {
  return `shape${t}`;
}

export function annotate(taskCode: number, values: number[]): { english: string; tree: Tree } {
  switch (taskCode) {
    case 0: {
      const words = values.map(color);
      return { english: `has-colors ${words.join(" ")}`, tree: ["has-colors", words] };
    }
    case 1: {
      const words = values.map(shape);
      return { english: `has-shapes ${words.join(" ")}`, tree: ["has-shapes", words] };
    }
    case 2: {
      const leaves: Tree[] = [];
      const words: string[] = [];
      for (let i = 0; i < values.length; i += 2) {
        const pair = [color(values[i]), shape(values[i + 1])];
        leaves.push(pair);
        words.push(...pair);
      }
      return { english: `has-shapecolors ${words.join(" ")}`, tree: ["has-shapecolors", leaves] };
    }
    case 3: {
      const [c1, t1, prep, c2, t2] = values;
      const first = [color(c1), shape(t1)];
      const second = [color(c2), shape(t2)];
      const english = [...first, PREPS[prep], ...second].join(" ");
      return { english, tree: [PREPS[prep], [first, second]] };
    }
    default:
      throw new Error(`unknown task code ${taskCode}`);
  }
}
