/**
 * JSONL dataset loading with strict schema validation.
 *
 * Mirrors the toolchain's sample schema: every row must carry id, dataset,
 * story, question, a non-empty answer, and a split tag; belief order is an
 * integer 0-4 and mandatory for the order-stratified datasets.
 */

import { createReadStream } from 'node:fs';
import { createInterface } from 'node:readline';
import { z } from 'zod';

export const DATASETS = [
  'hitom',
  'tom4_ood',
  'tomi',
  'exploretom_struct',
  'exploretom_infilled',
  'custom',
] as const;

const ORDERED_DATASETS = new Set(['hitom', 'tom4_ood']);

export const SampleRecordSchema = z
  .object({
    id: z.string().min(1),
    dataset: z.enum(DATASETS),
    story: z.string(),
    question: z.string(),
    answer: z.string().min(1),
    order: z.number().int().min(0).max(4).nullable().optional(),
    split: z.enum(['train', 'val', 'test']),
    thinking: z.string().optional(),
  })
  .strict()
  .superRefine((row, ctx) => {
    if (ORDERED_DATASETS.has(row.dataset) && (row.order === null || row.order === undefined)) {
      ctx.addIssue({
        code: 'custom',
        path: ['order'],
        message: `order is required for dataset ${row.dataset}`,
      });
    }
  });

export type SampleRecord = z.infer<typeof SampleRecordSchema>;

export class SampleSchemaError extends Error {
  constructor(
    readonly line: number,
    message: string,
  ) {
    super(`line ${line}: ${message}`);
    this.name = 'SampleSchemaError';
  }
}

/** Load and validate a JSONL dataset, preserving file order. */
export async function loadSamples(path: string): Promise<SampleRecord[]> {
  const records: SampleRecord[] = [];
  const rl = createInterface({
    input: createReadStream(path, { encoding: 'utf-8' }),
    crlfDelay: Infinity,
  });

  let lineNumber = 0;
  for await (const line of rl) {
    lineNumber++;
    const trimmed = line.trim();
    if (!trimmed) continue;

    let parsed: unknown;
    try {
      parsed = JSON.parse(trimmed);
    } catch {
      throw new SampleSchemaError(lineNumber, `invalid JSON: ${trimmed.slice(0, 80)}`);
    }

    const result = SampleRecordSchema.safeParse(parsed);
    if (!result.success) {
      const issue = result.error.issues[0];
      const field = issue.path.join('.') || '<row>';
      throw new SampleSchemaError(lineNumber, `field '${field}': ${issue.message}`);
    }
    records.push(result.data);
  }
  return records;
}

/** Async variant yielding one validated record at a time. */
export async function* iterSamples(path: string): AsyncGenerator<SampleRecord> {
  for (const record of await loadSamples(path)) {
    yield record;
  }
}
