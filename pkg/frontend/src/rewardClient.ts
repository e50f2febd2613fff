/**
 * Client for the reward scoring service.
 *
 * The service is the single source of scoring truth; this client only
 * chunks, ships, and reassembles. Results come back in request order and
 * are numerically identical to the engine behind the service.
 */

export interface RewardClientConfig {
  baseUrl: string;
  timeoutS?: number;
  batchSize?: number;
  implicitThink?: boolean;
}

/** One scored response, camel-cased from the service wire format. */
export interface RewardBreakdown {
  formatReward: number;
  answerReward: number;
  total: number;
  wellFormed: boolean;
  extractedAnswer: string | null;
}

interface WireItem {
  format_reward: number;
  answer_reward: number;
  total: number;
  well_formed: boolean;
  extracted_answer: string | null;
}

export class RewardServiceError extends Error {
  constructor(
    message: string,
    readonly batchIndex?: number,
    readonly itemRange?: [number, number],
  ) {
    super(message);
    this.name = 'RewardServiceError';
  }
}

/**
 * Canonical one-line JSON for a wire item; matches the scoring CLI's
 * output format byte for byte.
 */
export function wireJson(item: WireItem): string {
  const answer = item.extracted_answer === null ? 'null' : JSON.stringify(item.extracted_answer);
  return (
    `{"format_reward": ${item.format_reward}, "answer_reward": ${item.answer_reward}, ` +
    `"total": ${item.total}, "well_formed": ${item.well_formed}, "extracted_answer": ${answer}}`
  );
}

function fromWire(item: WireItem): RewardBreakdown {
  return {
    formatReward: item.format_reward,
    answerReward: item.answer_reward,
    total: item.total,
    wellFormed: item.well_formed,
    extractedAnswer: item.extracted_answer,
  };
}

export class RewardClient {
  private readonly baseUrl: string;
  private readonly timeoutMs: number;
  private readonly batchSize: number;
  private readonly implicitThink: boolean | undefined;

  constructor(config: RewardClientConfig) {
    const batchSize = config.batchSize ?? 512;
    if (batchSize < 1 || !Number.isInteger(batchSize)) {
      throw new RangeError(`batchSize must be a positive integer, got ${batchSize}`);
    }
    this.baseUrl = config.baseUrl.replace(/\/+$/, '');
    this.timeoutMs = (config.timeoutS ?? 60) * 1000;
    this.batchSize = batchSize;
    this.implicitThink = config.implicitThink;
  }

  async healthy(): Promise<boolean> {
    try {
      const res = await fetch(`${this.baseUrl}/healthz`, {
        signal: AbortSignal.timeout(this.timeoutMs),
      });
      return res.ok;
    } catch {
      return false;
    }
  }

  /** Score paired responses/truths, preserving order across batches. */
  async scoreBatch(responses: string[], groundTruths: string[]): Promise<RewardBreakdown[]> {
    const wire = await this.scoreBatchWire(responses, groundTruths);
    return wire.map(fromWire);
  }

  /** Like scoreBatch but returning raw snake_case wire items. */
  async scoreBatchWire(responses: string[], groundTruths: string[]): Promise<WireItem[]> {
    if (responses.length !== groundTruths.length) {
      throw new RangeError(
        `responses (${responses.length}) and groundTruths (${groundTruths.length}) must align`,
      );
    }
    const out: WireItem[] = [];
    for (let start = 0; start < responses.length; start += this.batchSize) {
      const end = Math.min(start + this.batchSize, responses.length);
      const items = [];
      for (let i = start; i < end; i++) {
        items.push({
          response: responses[i],
          ground_truth: groundTruths[i],
          ...(this.implicitThink === undefined ? {} : { implicit_think: this.implicitThink }),
        });
      }
      const batchIndex = Math.floor(start / this.batchSize);
      let res: Response;
      try {
        res = await fetch(`${this.baseUrl}/v1/score_batch`, {
          method: 'POST',
          headers: { 'Content-Type': 'application/json' },
          body: JSON.stringify({ items }),
          signal: AbortSignal.timeout(this.timeoutMs),
        });
      } catch (cause) {
        throw new RewardServiceError(
          `batch ${batchIndex} (items ${start}-${end - 1}) failed: ${String(cause)}`,
          batchIndex,
          [start, end - 1],
        );
      }
      if (!res.ok) {
        const body = await res.text().catch(() => '');
        throw new RewardServiceError(
          `batch ${batchIndex} (items ${start}-${end - 1}): HTTP ${res.status} ${body.slice(0, 200)}`,
          batchIndex,
          [start, end - 1],
        );
      }
      const payload = (await res.json()) as { items: WireItem[] };
      if (!Array.isArray(payload.items) || payload.items.length !== items.length) {
        throw new RewardServiceError(
          `batch ${batchIndex}: expected ${items.length} results, got ${payload.items?.length}`,
          batchIndex,
          [start, end - 1],
        );
      }
      out.push(...payload.items);
    }
    return out;
  }
}
