#!/usr/bin/env node
// clip-export: run a pretrained dual encoder and write EMB1 files.
//
//   clip-export text   --model <id> --prompts <txt> --out <emb1> [--template "a photo of *"]
//   clip-export images --model <id> --dir <path> --out <emb1>
//
// Exit codes: 0 success, 2 validation error, 1 runtime error.

import { readFile } from "fs/promises";
import { existsSync } from "fs";

import { DEFAULT_MODEL, loadImageEncoder, loadTextEncoder } from "./encoder.js";
import {
  DEFAULT_TEMPLATE,
  ExportJob,
  exportImages,
  exportText,
} from "./export.js";

class UsageError extends Error {}

function parseFlags(argv: string[], allowed: Set<string>): Map<string, string> {
  const flags = new Map<string, string>();
  for (let i = 0; i < argv.length; i += 2) {
    const key = argv[i];
    if (!key.startsWith("--") || !allowed.has(key)) {
      throw new UsageError(`unknown flag ${key}`);
    }
    const value = argv[i + 1];
    if (value === undefined) {
      throw new UsageError(`flag ${key} needs a value`);
    }
    flags.set(key, value);
  }
  return flags;
}

function required(flags: Map<string, string>, key: string): string {
  const value = flags.get(key);
  if (value === undefined) {
    throw new UsageError(`missing required flag ${key}`);
  }
  return value;
}

async function parseTextJob(argv: string[]): Promise<ExportJob> {
  const flags = parseFlags(
    argv,
    new Set(["--model", "--prompts", "--out", "--template"]),
  );
  const promptsPath = required(flags, "--prompts");
  const out = required(flags, "--out");
  if (!existsSync(promptsPath)) {
    throw new UsageError(`no such prompts file: ${promptsPath}`);
  }
  const classNames = (await readFile(promptsPath, "utf-8"))
    .split("\n")
    .map((line) => line.trim())
    .filter((line) => line.length > 0);
  if (classNames.length === 0) {
    throw new UsageError(`${promptsPath} contains no class names`);
  }
  const template = flags.get("--template") ?? DEFAULT_TEMPLATE;
  if (!template.includes("*")) {
    throw new UsageError(`--template must contain "*", got ${template}`);
  }
  const model = flags.get("--model") ?? DEFAULT_MODEL;
  return { task: "text", model, classNames, template, out };
}

function parseImagesJob(argv: string[]): ExportJob {
  const flags = parseFlags(argv, new Set(["--model", "--dir", "--out"]));
  const dir = required(flags, "--dir");
  const out = required(flags, "--out");
  if (!existsSync(dir)) {
    throw new UsageError(`no such directory: ${dir}`);
  }
  return { task: "images", model: flags.get("--model") ?? DEFAULT_MODEL, dir, out };
}

export async function runJob(job: ExportJob): Promise<void> {
  if (job.task === "text") {
    const encoder = await loadTextEncoder(job.model);
    const count = await exportText(job.classNames, job.template, encoder, job.out);
    console.log(`wrote ${count} text embeddings (dim ${encoder.dim}) to ${job.out}`);
  } else {
    const encoder = await loadImageEncoder(job.model);
    const { written, skipped } = await exportImages(job.dir, encoder, job.out);
    console.log(
      `wrote ${written} image embeddings (dim ${encoder.dim}) to ${job.out}` +
        (skipped.length > 0 ? `, skipped ${skipped.length}` : ""),
    );
  }
}

export async function main(argv: string[]): Promise<number> {
  try {
    const [command, ...rest] = argv;
    let job: ExportJob;
    if (command === "text") {
      job = await parseTextJob(rest);
    } else if (command === "images") {
      job = parseImagesJob(rest);
    } else {
      throw new UsageError(
        `usage: clip-export <text|images> ... (got ${command ?? "nothing"})`,
      );
    }
    await runJob(job);
    return 0;
  } catch (err) {
    const message = err instanceof Error ? err.message : String(err);
    console.error(`error: ${message}`);
    return err instanceof UsageError ? 2 : 1;
  }
}

const invokedDirectly =
  process.argv[1] !== undefined &&
  import.meta.url.endsWith(process.argv[1].split("/").pop() ?? "");
if (invokedDirectly) {
  main(process.argv.slice(2)).then((code) => {
    process.exitCode = code;
  });
}
