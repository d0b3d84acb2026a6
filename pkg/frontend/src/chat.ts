import { ApiClient, ApiError, AskResponse, SelectedSentence } from "./api.js";

export interface ChatExchange {
  question: string;
  answer?: string;
  selected?: SelectedSentence[];
  approach: string;
  metric: string;
  timestamp: number;
  error?: { status: number; stage: string; message: string };
}

export interface ChatElements {
  conversation: HTMLElement;
  questionInput: HTMLTextAreaElement | HTMLInputElement;
  sendButton: HTMLButtonElement;
  approachSelect: HTMLSelectElement;
  metricSelect: HTMLSelectElement;
  dedupToggle: HTMLInputElement;
  disclaimer: HTMLElement;
}

const FALLBACK_APPROACHES = [{ name: "tfidf", ready: true }];

function turnElement(speaker: "human" | "bot", cssClass = ""): HTMLDivElement {
  const turn = document.createElement("div");
  turn.className = `turn ${speaker}${cssClass ? " " + cssClass : ""}`;
  const label = document.createElement("span");
  label.className = "speaker";
  label.textContent = speaker === "human" ? "Human" : "Bot";
  turn.appendChild(label);
  return turn;
}

/** Bar width on the fixed [-1, 1] scale for cosine; raw value otherwise. */
export function scoreBarWidth(score: number, metric: string): number {
  const fraction = metric === "cosine" ? (score + 1) / 2 : score;
  return Math.max(0, Math.min(1, fraction)) * 100;
}

export class ChatController {
  readonly history: ChatExchange[] = [];
  private inFlight = false;

  constructor(
    private client: ApiClient,
    private el: ChatElements,
  ) {
    this.el.sendButton.addEventListener("click", () => void this.sendQuestion());
    this.el.questionInput.addEventListener("input", () => this.syncSendState());
    this.el.questionInput.addEventListener("keydown", (event) => {
      if ((event as KeyboardEvent).key === "Enter" && !(event as KeyboardEvent).shiftKey) {
        event.preventDefault();
        void this.sendQuestion();
      }
    });
    this.syncSendState();
  }

  get busy(): boolean {
    return this.inFlight;
  }

  private syncSendState(): void {
    this.el.sendButton.disabled = this.inFlight || !this.el.questionInput.value.trim();
  }

  async refreshApproaches(): Promise<void> {
    let entries;
    try {
      entries = await this.client.approaches();
    } catch {
      entries = FALLBACK_APPROACHES;
    }
    const previous = this.el.approachSelect.value;
    this.el.approachSelect.innerHTML = "";
    for (const entry of entries) {
      const option = document.createElement("option");
      option.value = entry.name;
      option.textContent = entry.ready ? entry.name : `${entry.name} (unready)`;
      option.disabled = !entry.ready;
      this.el.approachSelect.appendChild(option);
    }
    const names = entries.filter((e) => e.ready).map((e) => e.name);
    this.el.approachSelect.value = names.includes(previous) ? previous : names[0] ?? "tfidf";
  }

  async sendQuestion(): Promise<void> {
    const question = this.el.questionInput.value.trim();
    if (!question || this.inFlight) {
      return;
    }
    const approach = this.el.approachSelect.value || "tfidf";
    const metric = this.el.metricSelect.value || "cosine";
    const dedup = this.el.dedupToggle.checked;

    this.inFlight = true;
    this.syncSendState();
    this.appendHumanTurn(question);
    this.el.questionInput.value = "";

    const exchange: ChatExchange = {
      question,
      approach,
      metric,
      timestamp: Date.now(),
    };
    try {
      const response = await this.client.ask({ question, approach, metric, dedup });
      exchange.answer = response.answer;
      exchange.selected = response.selected;
      this.appendBotTurn(response);
      this.el.disclaimer.textContent = response.disclaimer;
    } catch (error) {
      const status = error instanceof ApiError ? error.status : 0;
      const stage = error instanceof ApiError ? error.stage : "unknown";
      const message = error instanceof Error ? error.message : String(error);
      exchange.error = { status, stage, message };
      this.appendErrorTurn(stage, message);
    } finally {
      this.history.push(exchange);
      this.inFlight = false;
      this.syncSendState();
    }
  }

  private appendHumanTurn(question: string): void {
    const turn = turnElement("human");
    const text = document.createElement("p");
    text.className = "answer-text";
    text.textContent = question;
    turn.appendChild(text);
    this.el.conversation.appendChild(turn);
  }

  private appendBotTurn(response: AskResponse): void {
    const turn = turnElement("bot");

    // the answer is rendered verbatim; all ranking happened server-side
    const text = document.createElement("p");
    text.className = "answer-text";
    text.textContent = response.answer;
    turn.appendChild(text);

    const details = document.createElement("details");
    details.className = "answer-details";
    const summary = document.createElement("summary");
    summary.textContent = `${response.approach} / ${response.metric} - sentence scores`;
    details.appendChild(summary);

    const scoreList = document.createElement("ul");
    scoreList.className = "score-list";
    for (const entry of response.selected) {
      scoreList.appendChild(this.scoreRow(entry, response.metric));
    }
    details.appendChild(scoreList);

    const rawHeading = document.createElement("p");
    rawHeading.className = "raw-heading";
    rawHeading.textContent = "Raw answer before filtering:";
    details.appendChild(rawHeading);
    const raw = document.createElement("pre");
    raw.className = "raw-text";
    raw.textContent = response.raw_text;
    details.appendChild(raw);

    turn.appendChild(details);
    this.el.conversation.appendChild(turn);
  }

  private scoreRow(entry: SelectedSentence, metric: string): HTMLLIElement {
    const row = document.createElement("li");
    row.className = "score-row";

    const bar = document.createElement("div");
    bar.className = "score-bar";
    const fill = document.createElement("div");
    fill.className = "score-bar-fill";
    fill.style.width = `${scoreBarWidth(entry.score, metric)}%`;
    bar.appendChild(fill);
    row.appendChild(bar);

    const label = document.createElement("span");
    label.className = "score-value";
    label.textContent = `${entry.score.toFixed(4)} (${metric})`;
    row.appendChild(label);

    const sentence = document.createElement("span");
    sentence.className = "score-sentence";
    sentence.textContent = entry.sentence;
    row.appendChild(sentence);

    return row;
  }

  private appendErrorTurn(stage: string, message: string): void {
    const turn = turnElement("bot", "error");
    const text = document.createElement("p");
    text.className = "error-text";
    text.textContent = `Request failed at stage "${stage}": ${message}`;
    turn.appendChild(text);
    this.el.conversation.appendChild(turn);
  }
}
