import { ServiceClient, SynthesisService } from "./client.js";
import { ChatController, ChatTurn } from "./conversation.js";
import { SynthesizeResponse } from "./types.js";

/** Render one bot/user turn and wire the composer to the controller. */

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function renderCallPreview(doc: Document, response: SynthesizeResponse): HTMLElement {
  const box = el(doc, "div", "call-preview");
  const call = response.call;
  if (!call) return box;

  const urlLine = el(doc, "code", "call-url", `${call.method} ${call.url}`);
  box.appendChild(urlLine);

  if (response.matrix.length > 0) {
    const table = el(doc, "table", "confidence-table");
    const head = el(doc, "tr");
    for (const title of ["parameter", "value", "confidence"]) {
      head.appendChild(el(doc, "th", undefined, title));
    }
    table.appendChild(head);
    for (const row of response.matrix) {
      const tr = el(doc, "tr");
      tr.appendChild(el(doc, "td", undefined, row.param));
      tr.appendChild(el(doc, "td", undefined, row.entity.replaceAll("_", " ")));
      tr.appendChild(el(doc, "td", undefined, row.confidence.toFixed(3)));
      table.appendChild(tr);
    }
    box.appendChild(table);
  }

  const invokeButton = el(doc, "button", "invoke-button", "Invoke");
  const invokeNote = el(doc, "div", "invoke-note");
  invokeButton.addEventListener("click", () => {
    if (response.invocation) {
      // live mode: the service already performed the call
      const status = response.invocation.http_status ?? response.invocation.kind;
      invokeNote.textContent = `${status}: ${response.invocation.response_body ?? response.invocation.error ?? ""}`;
    } else {
      invokeNote.textContent = "dry-run mode: the call was not executed.";
    }
  });
  box.appendChild(invokeButton);
  box.appendChild(invokeNote);
  return box;
}

function renderCoverageBar(doc: Document, response: SynthesizeResponse): HTMLElement {
  const wrap = el(doc, "div", "coverage-bar");
  const coverage = response.coverage ? response.coverage.coverage : 0;
  const fill = el(doc, "div", "coverage-fill");
  fill.style.width = `${Math.round(coverage * 100)}%`;
  wrap.title = `coverage ${(coverage * 100).toFixed(0)}%`;
  wrap.appendChild(fill);
  return wrap;
}

export function renderTurn(doc: Document, turn: ChatTurn): HTMLElement {
  const node = el(doc, "div", `turn turn-${turn.author}`);
  node.appendChild(el(doc, "div", "turn-text", turn.text));
  if (turn.attached) {
    node.appendChild(renderCoverageBar(doc, turn.attached));
    if (turn.attached.status === "ready") {
      node.appendChild(renderCallPreview(doc, turn.attached));
    }
  }
  return node;
}

export interface ChatPage {
  controller: ChatController;
  input: HTMLInputElement;
  sendButton: HTMLButtonElement;
  log: HTMLElement;
}

/**
 * Mount the chat onto a document containing #chat-log, #chat-input and
 * #chat-send.  The input doubles as the answer field while a follow-up
 * question is pending.
 */
export function mountChat(doc: Document, service: SynthesisService): ChatPage {
  const log = doc.getElementById("chat-log") as HTMLElement;
  const input = doc.getElementById("chat-input") as HTMLInputElement;
  const sendButton = doc.getElementById("chat-send") as HTMLButtonElement;

  const controller = new ChatController(service, (turn) => {
    log.appendChild(renderTurn(doc, turn));
    refresh();
  });

  function refresh(): void {
    sendButton.disabled = controller.busy || input.value.trim() === "";
    const awaiting = controller.awaitingParam;
    input.placeholder = awaiting
      ? `Answer: value for '${awaiting}'`
      : "Ask for something, e.g. “any chinese restaurant near sydney opera house”";
  }

  async function submit(): Promise<void> {
    const text = input.value.trim();
    if (!text || controller.busy) return;
    input.value = "";
    refresh();
    const awaiting = controller.awaitingParam;
    try {
      if (awaiting) {
        await controller.answerSlot(awaiting, text);
      } else {
        await controller.sendExpression(text);
      }
    } finally {
      refresh();
    }
  }

  sendButton.addEventListener("click", () => void submit());
  input.addEventListener("keydown", (event) => {
    if ((event as KeyboardEvent).key === "Enter") void submit();
  });
  input.addEventListener("input", refresh);
  refresh();

  return { controller, input, sendButton, log };
}

export function bootstrap(doc: Document, win: Window): ChatPage {
  const params = new URLSearchParams(win.location.search);
  const base =
    params.get("service") ??
    (win as unknown as { APISYNTH_SERVICE_URL?: string }).APISYNTH_SERVICE_URL ??
    "http://127.0.0.1:8080";
  return mountChat(doc, new ServiceClient(base));
}
