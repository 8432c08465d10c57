import { SynthesisService } from "./client.js";
import { SynthesizeResponse } from "./types.js";

export interface ChatTurn {
  author: "user" | "bot";
  text: string;
  /** full service response, for call preview / confidence table rendering */
  attached?: SynthesizeResponse;
  /** transport failed; the last request can be retried */
  retryable?: boolean;
}

export interface PendingSlots {
  expression: string;
  bindings: Record<string, string>;
  missing: string[];
}

/**
 * Conversation state machine.
 *
 * All state lives here, client-side: the service is stateless, so every
 * synthesize request carries the expression plus the bindings accumulated
 * for it.  At most one request is in flight at a time; a needs_input
 * answer asks one question per turn; a new expression resets the slots.
 */
export class ChatController {
  readonly turns: ChatTurn[] = [];
  private pending: PendingSlots | null = null;
  private inFlight = false;

  constructor(
    private readonly service: SynthesisService,
    private readonly onTurn: (turn: ChatTurn) => void = () => {},
  ) {}

  get busy(): boolean {
    return this.inFlight;
  }

  get slots(): PendingSlots | null {
    return this.pending;
  }

  /** The parameter the bot is currently asking about, if any. */
  get awaitingParam(): string | null {
    return this.pending && this.pending.missing.length > 0
      ? this.pending.missing[0]
      : null;
  }

  async sendExpression(text: string): Promise<void> {
    const expression = text.trim();
    if (!expression) {
      throw new Error("expression is empty");
    }
    this.ensureIdle();
    this.pending = { expression, bindings: {}, missing: [] };
    this.pushTurn({ author: "user", text: expression });
    await this.submit();
  }

  async answerSlot(param: string, value: string): Promise<void> {
    const answer = value.trim();
    if (!answer) {
      throw new Error("answer is empty");
    }
    this.ensureIdle();
    if (!this.pending || !this.pending.missing.includes(param)) {
      throw new Error(`no pending question for parameter '${param}'`);
    }
    this.pending.bindings[param] = answer;
    this.pending.missing = this.pending.missing.filter((name) => name !== param);
    this.pushTurn({ author: "user", text: answer });
    await this.submit();
  }

  /** Resend the last request after a transport failure. */
  async retry(): Promise<void> {
    this.ensureIdle();
    if (!this.pending) {
      throw new Error("nothing to retry");
    }
    await this.submit();
  }

  private ensureIdle(): void {
    if (this.inFlight) {
      throw new Error("a request is already in flight");
    }
  }

  private pushTurn(turn: ChatTurn): void {
    this.turns.push(turn);
    this.onTurn(turn);
  }

  private async submit(): Promise<void> {
    if (!this.pending) {
      throw new Error("no expression to submit");
    }
    const { expression, bindings } = this.pending;
    this.inFlight = true;
    let response: SynthesizeResponse;
    try {
      response = await this.service.synthesize({ expression, bindings });
    } catch (cause) {
      this.pushTurn({
        author: "bot",
        text: `I could not reach the service (${String(cause)}). Try again?`,
        retryable: true,
      });
      return;
    } finally {
      this.inFlight = false;
    }
    this.handleResponse(response);
  }

  private handleResponse(response: SynthesizeResponse): void {
    switch (response.status) {
      case "ready": {
        this.pending = null;
        const url = response.call ? response.call.url : "";
        this.pushTurn({
          author: "bot",
          text: `Here is the call I synthesized: ${url}`,
          attached: response,
        });
        return;
      }
      case "needs_input": {
        const missing = response.coverage ? response.coverage.missing_required : [];
        if (this.pending) {
          this.pending.missing = [...missing];
        }
        // one question per turn, in missing-list order
        const question =
          response.questions[0] ?? `What value should I use for '${missing[0]}'?`;
        this.pushTurn({ author: "bot", text: question, attached: response });
        return;
      }
      case "no_match": {
        this.pending = null;
        const reason = response.reason ? ` (${response.reason})` : "";
        this.pushTurn({
          author: "bot",
          text:
            `Sorry, I could not match that to any API I know${reason}. ` +
            "See the API catalog for what I can do.",
          attached: response,
        });
        return;
      }
    }
  }
}
