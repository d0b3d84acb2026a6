import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient, AskResponse } from "../src/api.js";
import { ChatController, ChatElements, scoreBarWidth } from "../src/chat.js";

import askOk from "./fixtures/ask_ok.json";
import ask502 from "./fixtures/ask_502.json";
import approachesTfidfOnly from "./fixtures/approaches_tfidf_only.json";
import approachesBertUnready from "./fixtures/approaches_bert_unready.json";

function jsonResponse(payload: unknown, status = 200): Response {
  return new Response(JSON.stringify(payload), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function buildDom(): ChatElements {
  document.body.innerHTML = `
    <div id="conversation"></div>
    <textarea id="question-input"></textarea>
    <button id="send-button"></button>
    <select id="approach-select"></select>
    <select id="metric-select">
      <option value="cosine" selected>cosine</option>
      <option value="inner_product">inner_product</option>
    </select>
    <input type="checkbox" id="dedup-toggle">
    <div id="disclaimer"></div>
  `;
  return {
    conversation: document.getElementById("conversation")!,
    questionInput: document.getElementById("question-input") as HTMLTextAreaElement,
    sendButton: document.getElementById("send-button") as HTMLButtonElement,
    approachSelect: document.getElementById("approach-select") as HTMLSelectElement,
    metricSelect: document.getElementById("metric-select") as HTMLSelectElement,
    dedupToggle: document.getElementById("dedup-toggle") as HTMLInputElement,
    disclaimer: document.getElementById("disclaimer")!,
  };
}

const fetchMock = vi.fn();

function makeController(): { controller: ChatController; el: ChatElements } {
  const el = buildDom();
  const controller = new ChatController(new ApiClient("http://service.test"), el);
  return { controller, el };
}

async function send(controller: ChatController, el: ChatElements, question: string) {
  el.questionInput.value = question;
  await controller.sendQuestion();
}

beforeEach(() => {
  vi.stubGlobal("fetch", fetchMock);
});

afterEach(() => {
  fetchMock.mockReset();
  vi.unstubAllGlobals();
});

describe("send_question rendering", () => {
  it("renders exactly the recorded payload's sentences and scores", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(askOk));
    const { controller, el } = makeController();
    await send(controller, el, askOk.question);

    const turns = el.conversation.querySelectorAll(".turn");
    expect(turns).toHaveLength(2); // Human turn then Bot turn
    expect(turns[0].classList.contains("human")).toBe(true);
    expect(turns[0].querySelector(".answer-text")!.textContent).toBe(askOk.question);

    const bot = turns[1];
    expect(bot.querySelector(".answer-text")!.textContent).toBe(askOk.answer);

    const rows = bot.querySelectorAll(".score-row");
    expect(rows).toHaveLength(askOk.selected.length);
    askOk.selected.forEach((entry, i) => {
      expect(rows[i].querySelector(".score-sentence")!.textContent).toBe(entry.sentence);
      expect(rows[i].querySelector(".score-value")!.textContent).toBe(
        `${entry.score.toFixed(4)} (${askOk.metric})`,
      );
    });

    expect(bot.querySelector(".raw-text")!.textContent).toBe(askOk.raw_text);
    expect(el.disclaimer.textContent).toBe(askOk.disclaimer);
  });

  it("renders one score row per selected sentence", async () => {
    const threeSentences: AskResponse = {
      ...(askOk as AskResponse),
      answer: "One. Two. Three.",
      selected: [
        { sentence: "One.", score: 0.9, index: 0 },
        { sentence: "Two.", score: 0.5, index: 1 },
        { sentence: "Three.", score: -0.2, index: 2 },
      ],
    };
    fetchMock.mockResolvedValueOnce(jsonResponse(threeSentences));
    const { controller, el } = makeController();
    await send(controller, el, "three things?");
    expect(el.conversation.querySelectorAll(".score-row")).toHaveLength(3);
  });

  it("POSTs the question with the selected options", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(askOk));
    const { controller, el } = makeController();
    el.dedupToggle.checked = true;
    el.approachSelect.innerHTML = '<option value="tfidf" selected>tfidf</option>';
    await send(controller, el, "a question?");

    expect(fetchMock).toHaveBeenCalledTimes(1);
    const [url, init] = fetchMock.mock.calls[0];
    expect(url).toBe("http://service.test/api/ask");
    expect(JSON.parse(init.body)).toEqual({
      question: "a question?",
      approach: "tfidf",
      metric: "cosine",
      dedup: true,
    });
  });

  it("does not issue a request for empty input", async () => {
    const { controller, el } = makeController();
    expect(el.sendButton.disabled).toBe(true);
    await send(controller, el, "   ");
    expect(fetchMock).not.toHaveBeenCalled();
    expect(el.conversation.children).toHaveLength(0);
  });
});

describe("error turns", () => {
  it("renders a recorded 502 payload as an inline error turn naming the stage", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(ask502, 502));
    const { controller, el } = makeController();
    await send(controller, el, "what about vaccines?");

    const turns = el.conversation.querySelectorAll(".turn");
    expect(turns).toHaveLength(2);
    const errorTurn = turns[1];
    expect(errorTurn.classList.contains("error")).toBe(true);
    expect(errorTurn.textContent).toContain('stage "embed"');
    expect(errorTurn.textContent).toContain("embedding provider unreachable");
  });

  it("keeps the conversation going after an error", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(ask502, 502))
      .mockResolvedValueOnce(jsonResponse(askOk));
    const { controller, el } = makeController();
    await send(controller, el, "first try?");
    await send(controller, el, "second try?");

    expect(el.conversation.querySelectorAll(".turn")).toHaveLength(4);
    expect(el.conversation.querySelectorAll(".turn.error")).toHaveLength(1);
    expect(controller.history).toHaveLength(2);
    expect(controller.history[0].error?.stage).toBe("embed");
    expect(controller.history[1].answer).toBe(askOk.answer);
  });

  it("renders a network failure inline too", async () => {
    fetchMock.mockRejectedValueOnce(new TypeError("fetch failed"));
    const { controller, el } = makeController();
    await send(controller, el, "anyone there?");
    expect(el.conversation.querySelectorAll(".turn.error")).toHaveLength(1);
  });
});

describe("approach selector", () => {
  it("renders an unready approach as disabled", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse(approachesBertUnready));
    const { controller, el } = makeController();
    await controller.refreshApproaches();

    const options = Array.from(el.approachSelect.options);
    expect(options.map((o) => o.value)).toEqual(["tfidf", "bert"]);
    expect(options[0].disabled).toBe(false);
    expect(options[1].disabled).toBe(true);
    expect(el.approachSelect.value).toBe("tfidf");
  });

  it("renders four enabled options when every backend is ready", async () => {
    fetchMock.mockResolvedValueOnce(jsonResponse({
      approaches: ["tfidf", "bert", "biobert", "use"].map((name) => ({ name, ready: true })),
    }));
    const { controller, el } = makeController();
    await controller.refreshApproaches();
    const options = Array.from(el.approachSelect.options);
    expect(options).toHaveLength(4);
    expect(options.every((o) => !o.disabled)).toBe(true);
  });

  it("falls back to tfidf only when the fetch fails", async () => {
    fetchMock.mockRejectedValueOnce(new TypeError("fetch failed"));
    const { controller, el } = makeController();
    await controller.refreshApproaches();
    const options = Array.from(el.approachSelect.options);
    expect(options.map((o) => o.value)).toEqual(["tfidf"]);
    expect(options[0].disabled).toBe(false);
  });

  it("keeps the conversation when approaches are refreshed", async () => {
    fetchMock
      .mockResolvedValueOnce(jsonResponse(askOk))
      .mockResolvedValueOnce(jsonResponse(approachesTfidfOnly));
    const { controller, el } = makeController();
    await send(controller, el, askOk.question);
    await controller.refreshApproaches();
    expect(el.conversation.querySelectorAll(".turn")).toHaveLength(2);
    expect(controller.history).toHaveLength(1);
  });
});

describe("score bars", () => {
  it("maps cosine scores onto the fixed [-1, 1] scale", () => {
    expect(scoreBarWidth(-1, "cosine")).toBe(0);
    expect(scoreBarWidth(0, "cosine")).toBe(50);
    expect(scoreBarWidth(1, "cosine")).toBe(100);
  });

  it("uses the raw value for inner product, clamped to the bar", () => {
    expect(scoreBarWidth(0.25, "inner_product")).toBe(25);
    expect(scoreBarWidth(1.5, "inner_product")).toBe(100);
    expect(scoreBarWidth(-0.5, "inner_product")).toBe(0);
  });
});

describe("send control", () => {
  it("disables sending while a question is in flight", async () => {
    let release: (value: Response) => void;
    fetchMock.mockImplementationOnce(
      () => new Promise<Response>((resolve) => (release = resolve)),
    );
    const { controller, el } = makeController();
    el.questionInput.value = "slow question?";
    const pending = controller.sendQuestion();
    expect(controller.busy).toBe(true);
    expect(el.sendButton.disabled).toBe(true);
    release!(jsonResponse(askOk));
    await pending;
    expect(controller.busy).toBe(false);
  });
});
