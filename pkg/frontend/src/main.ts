// Browser bootstrap: wires the controller to the DOM. All state lives in the
// controller; this file only renders and forwards clicks.

import { PlanfitApi } from "./api.js";
import { AppController } from "./app.js";
import {
  renderChat,
  renderDashboard,
  renderErrorBanner,
  renderExerciseModal,
} from "./render.js";

const params = new URLSearchParams(window.location.search);
const baseUrl = params.get("service") ?? "http://127.0.0.1:8400";

const chatEl = document.getElementById("chat") as HTMLDivElement;
const dashboardEl = document.getElementById("dashboard") as HTMLDivElement;
const modalEl = document.getElementById("modal-host") as HTMLDivElement;
const bannerEl = document.getElementById("banner-host") as HTMLDivElement;
const inputEl = document.getElementById("chat-input") as HTMLInputElement;
const sendEl = document.getElementById("send-btn") as HTMLButtonElement;
const formEl = document.getElementById("chat-form") as HTMLFormElement;

const api = new PlanfitApi(baseUrl);
const app = new AppController(api, render);

function render(): void {
  chatEl.innerHTML = renderChat(app.chat);
  chatEl.scrollTop = chatEl.scrollHeight;
  dashboardEl.innerHTML = app.view ? renderDashboard(app.view) : "";
  modalEl.innerHTML = app.modal ? renderExerciseModal(app.modal) : "";
  bannerEl.innerHTML = app.banner
    ? renderErrorBanner(app.banner.kind, app.banner.message)
    : "";
  sendEl.disabled = app.inFlight;
  inputEl.placeholder = app.inFlight ? "waiting for the assistant..." : "type a message";
}

formEl.addEventListener("submit", (event) => {
  event.preventDefault();
  const text = inputEl.value;
  inputEl.value = "";
  void app.sendMessage(text).then((outcome) => {
    if (!outcome.ok && outcome.preservedInput) {
      inputEl.value = outcome.preservedInput; // failed sends keep the input
    }
  });
});

dashboardEl.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  const rowId = target.dataset.rowId;
  if (!rowId) return;
  if (target.classList.contains("select-btn")) void app.selectExercise(rowId);
  if (target.classList.contains("more-btn")) void app.showMore(rowId);
});

modalEl.addEventListener("click", (event) => {
  if ((event.target as HTMLElement).classList.contains("close-btn")) app.closeModal();
});

bannerEl.addEventListener("click", (event) => {
  if ((event.target as HTMLElement).classList.contains("retry-btn")) app.dismissBanner();
});

const name = window.prompt("What's your name?") || "friend";
void app.createSession(name);
