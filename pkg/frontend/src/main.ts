// DOM wiring: operator gate, the image pair, judgment buttons, error
// banner, and progress footer. All behavior lives in SessionController.

import { RatingApi } from "./api.js";
import { SessionController, type PairView, type Phase } from "./controller.js";
import { bindKeyboard } from "./keyboard.js";
import type { PairPayload } from "./types.js";

const OPERATOR_STORAGE_KEY = "chiprank.operator";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function loadInto(img: HTMLImageElement, url: string): Promise<void> {
  return new Promise((resolve, reject) => {
    img.onload = () => resolve();
    img.onerror = () => reject(new Error("image failed to load"));
    img.src = url;
  });
}

class DomView implements PairView {
  private readonly leftImage = el<HTMLImageElement>("left-image");
  private readonly rightImage = el<HTMLImageElement>("right-image");
  private readonly buttons = [
    el<HTMLButtonElement>("choose-left"),
    el<HTMLButtonElement>("choose-neutral"),
    el<HTMLButtonElement>("choose-right"),
  ];
  private readonly status = el<HTMLElement>("status-line");
  private readonly banner = el<HTMLElement>("error-banner");
  private readonly bannerMessage = el<HTMLElement>("error-message");
  private readonly sessionCount = el<HTMLElement>("session-count");
  private readonly serviceTotal = el<HTMLElement>("service-total");

  constructor(private readonly api: RatingApi) {}

  async displayPair(pair: PairPayload): Promise<void> {
    await Promise.all([
      loadInto(this.leftImage, this.api.imageUrl(pair.left_url)),
      loadInto(this.rightImage, this.api.imageUrl(pair.right_url)),
    ]);
  }

  setPhase(phase: Phase): void {
    const ready = phase === "ready";
    for (const button of this.buttons) {
      button.disabled = !ready;
    }
    if (phase !== "error") {
      this.banner.hidden = true;
    }
    this.status.textContent = {
      idle: "",
      loading: "loading images…",
      ready: "which image is more complex?",
      submitting: "recording…",
      error: "something went wrong",
    }[phase];
    document.body.dataset.phase = phase;
  }

  setSessionCount(count: number): void {
    this.sessionCount.textContent = String(count);
  }

  setServiceTotal(total: number | null): void {
    this.serviceTotal.textContent = total === null ? "–" : String(total);
  }

  showError(message: string): void {
    this.bannerMessage.textContent = message;
    this.banner.hidden = false;
  }
}

function boot(): void {
  const api = new RatingApi("");
  const view = new DomView(api);
  const controller = new SessionController(api, view);

  const gate = el<HTMLElement>("operator-gate");
  const rater = el<HTMLElement>("rater");
  const nameInput = el<HTMLInputElement>("operator-name");
  const startButton = el<HTMLButtonElement>("start-session");

  nameInput.value = localStorage.getItem(OPERATOR_STORAGE_KEY) ?? "";

  const begin = () => {
    const operator = nameInput.value.trim();
    if (operator === "") {
      nameInput.focus();
      return;
    }
    localStorage.setItem(OPERATOR_STORAGE_KEY, operator);
    gate.hidden = true;
    rater.hidden = false;
    void controller.start(operator);
  };

  startButton.addEventListener("click", begin);
  nameInput.addEventListener("keydown", (event) => {
    if (event.key === "Enter") {
      begin();
    }
  });

  el<HTMLButtonElement>("choose-left").addEventListener("click", () => void controller.judge("LEFT"));
  el<HTMLButtonElement>("choose-neutral").addEventListener(
    "click",
    () => void controller.judge("NEUTRAL"),
  );
  el<HTMLButtonElement>("choose-right").addEventListener(
    "click",
    () => void controller.judge("RIGHT"),
  );
  el<HTMLButtonElement>("retry").addEventListener("click", () => void controller.retry());
  el<HTMLButtonElement>("skip").addEventListener("click", () => void controller.skip());

  bindKeyboard(document, (outcome) => {
    if (!rater.hidden) {
      void controller.judge(outcome);
    }
  });

  view.setPhase("idle");
}

document.addEventListener("DOMContentLoaded", boot);
