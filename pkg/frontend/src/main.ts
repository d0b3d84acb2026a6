import { ApiClient } from "./api.js";
import { ChatController, ChatElements } from "./chat.js";

declare global {
  interface Window {
    CORDCHAT_API?: string;
  }
}

const DEFAULT_API = "http://127.0.0.1:8000";

function required<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const client = new ApiClient(window.CORDCHAT_API ?? DEFAULT_API);

const elements: ChatElements = {
  conversation: required<HTMLDivElement>("conversation"),
  questionInput: required<HTMLTextAreaElement>("question-input"),
  sendButton: required<HTMLButtonElement>("send-button"),
  approachSelect: required<HTMLSelectElement>("approach-select"),
  metricSelect: required<HTMLSelectElement>("metric-select"),
  dedupToggle: required<HTMLInputElement>("dedup-toggle"),
  disclaimer: required<HTMLDivElement>("disclaimer"),
};

const controller = new ChatController(client, elements);

const serverInput = required<HTMLInputElement>("server-input");
serverInput.value = window.CORDCHAT_API ?? DEFAULT_API;
serverInput.addEventListener("change", () => {
  client.setBaseUrl(serverInput.value.trim() || DEFAULT_API);
  void controller.refreshApproaches();
  void refreshStatus();
});

const statusLine = required<HTMLSpanElement>("status-line");

async function refreshStatus(): Promise<void> {
  try {
    const health = await client.health();
    statusLine.textContent = `${health.status} (${health.documents} documents)`;
  } catch {
    statusLine.textContent = "service unreachable";
  }
}

void controller.refreshApproaches();
void refreshStatus();
