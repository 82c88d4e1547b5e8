#!/usr/bin/env node
/**
 * Reference adapter for the line-delimited JSON wire protocol.
 *
 * Reads one request per stdin line and writes one response line per
 * request, flushed immediately:
 *
 *   request:  {"id": "<string>", "task": "correct", "input": "<text>"}
 *   response: {"id": "<same>", "output": "<text>"}
 *           | {"id": "<same>", "error": "<message>"}
 *
 * A malformed request line yields {"id": null, "error": "parse"} and the
 * process keeps serving; EOF on stdin exits 0. Requests share no state,
 * so responses may be produced in any order by other implementations —
 * clients must match by id.
 *
 * Modes:
 *   --mode echo                      return the input verbatim (default)
 *   --mode model --model <path.js>   module must export transform(input, task)
 */

import { createInterface } from "node:readline";
import { resolve } from "node:path";

export type Transform = (input: string, task: string) => string | Promise<string>;

export interface CliOptions {
  mode: "echo" | "model";
  modelPath?: string;
}

export function parseCli(argv: string[]): CliOptions {
  const options: CliOptions = { mode: "echo" };
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (arg === "--mode") {
      const value = argv[++i];
      if (value !== "echo" && value !== "model") {
        throw new Error(`unknown mode: ${value}`);
      }
      options.mode = value;
    } else if (arg === "--model") {
      options.modelPath = argv[++i];
    } else {
      throw new Error(`unknown argument: ${arg}`);
    }
  }
  if (options.mode === "model" && !options.modelPath) {
    throw new Error("--mode model requires --model <path>");
  }
  return options;
}

export function loadTransform(options: CliOptions): Transform {
  if (options.mode === "echo") {
    return (input) => input;
  }
  // eslint-disable-next-line @typescript-eslint/no-var-requires
  const loaded = require(resolve(options.modelPath as string));
  const transform: unknown = loaded.transform ?? loaded.default ?? loaded;
  if (typeof transform !== "function") {
    throw new Error(`model module ${options.modelPath} exports no transform()`);
  }
  return transform as Transform;
}

function writeLine(value: unknown): void {
  process.stdout.write(JSON.stringify(value) + "\n");
}

export async function serve(transform: Transform): Promise<void> {
  const lines = createInterface({ input: process.stdin, crlfDelay: Infinity });
  for await (const line of lines) {
    if (line.trim() === "") {
      continue;
    }
    let request: { id?: unknown; task?: unknown; input?: unknown };
    try {
      request = JSON.parse(line);
    } catch {
      writeLine({ id: null, error: "parse" });
      continue;
    }
    const id =
      typeof request.id === "string" || typeof request.id === "number"
        ? request.id
        : null;
    if (id === null || typeof request.input !== "string") {
      writeLine({ id, error: "parse" });
      continue;
    }
    try {
      const output = await transform(request.input, String(request.task ?? ""));
      writeLine({ id, output });
    } catch (error) {
      writeLine({ id, error: error instanceof Error ? error.message : String(error) });
    }
  }
}

async function main(): Promise<number> {
  let transform: Transform;
  try {
    transform = loadTransform(parseCli(process.argv.slice(2)));
  } catch (error) {
    process.stderr.write(`${error instanceof Error ? error.message : error}\n`);
    return 1;
  }
  await serve(transform);
  return 0;
}

if (require.main === module) {
  main().then(
    (code) => process.exitCode = code,
    (error) => {
      process.stderr.write(`fatal: ${error}\n`);
      process.exitCode = 1;
    },
  );
}
