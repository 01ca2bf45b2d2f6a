// Export jobs: class names -> text embeddings, image folder -> image
// embeddings, both written as EMB1 files the downstream tooling reads
// directly.

import { readdir, writeFile } from "fs/promises";
import path from "path";

import { encodeEmb1, Record_ } from "./emb1.js";
import { ImageEncoder, TextEncoder } from "./encoder.js";

export const DEFAULT_TEMPLATE = "a photo of *";

export type ExportJob =
  | { task: "text"; model: string; classNames: string[]; template: string; out: string }
  | { task: "images"; model: string; dir: string; out: string };

const IMAGE_EXTENSIONS = new Set([".jpg", ".jpeg", ".png", ".webp", ".bmp", ".gif"]);

export function fillTemplate(template: string, className: string): string {
  if (!template.includes("*")) {
    throw new Error(`template ${JSON.stringify(template)} has no "*" slot`);
  }
  return template.replaceAll("*", className);
}

export async function exportText(
  classNames: string[],
  template: string,
  encoder: TextEncoder,
  outPath: string,
): Promise<number> {
  if (classNames.length === 0) {
    throw new Error("no class names to export");
  }
  const prompts = classNames.map((name) => fillTemplate(template, name));
  const vectors = await encoder.encodeText(prompts);
  const records: Record_[] = classNames.map((name, i) => ({
    name,
    vector: vectors[i],
  }));
  await writeFile(outPath, encodeEmb1(records));
  return records.length;
}

export interface SkipEntry {
  file: string;
  reason: string;
}

export async function exportImages(
  directory: string,
  encoder: ImageEncoder,
  outPath: string,
): Promise<{ written: number; skipped: SkipEntry[] }> {
  const entries = (await readdir(directory, { withFileTypes: true }))
    .filter((e) => e.isFile() && IMAGE_EXTENSIONS.has(path.extname(e.name).toLowerCase()))
    .map((e) => e.name)
    .sort();
  if (entries.length === 0) {
    throw new Error(`no image files in ${directory}`);
  }

  const records: Record_[] = [];
  const skipped: SkipEntry[] = [];
  for (const name of entries) {
    const file = path.join(directory, name);
    try {
      const vector = await encoder.encodeImage(file);
      records.push({ name: path.parse(name).name, vector });
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      console.warn(`skipping ${file}: ${reason}`);
      skipped.push({ file, reason });
    }
  }
  if (records.length === 0) {
    throw new Error(`every image in ${directory} failed to decode`);
  }
  await writeFile(outPath, encodeEmb1(records));
  if (skipped.length > 0) {
    await writeFile(
      `${outPath}.skipped.json`,
      JSON.stringify({ skipped }, null, 2) + "\n",
    );
  }
  return { written: records.length, skipped };
}
