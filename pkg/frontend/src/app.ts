/** UI controller: search box, ranked results, expansion trace panel,
 *  document view with dwell tracking, and the interest widget.
 *
 *  Results render strictly in response order. Every opened document
 *  emits exactly one feedback record, carrying the measured dwell, when
 *  the reader navigates away. A failed feedback post is queued and
 *  retried once.
 */

import { ApiError, ClickItem, SearchClient, SearchResponse } from "./api";
import { Clock, DwellTimer } from "./dwell";

export interface AppOptions {
  userId?: string;
  debounceMs?: number;
  clock?: Clock;
}

export interface AppController {
  search(query: string): Promise<void>;
  openDoc(docId: string): Promise<void>;
  closeDoc(): Promise<void>;
  flushFeedbackQueue(): Promise<void>;
  lastResponse(): SearchResponse | null;
  renderedDocIds(): string[];
  pendingFeedbackCount(): number;
}

interface QueuedFeedback {
  queryId: string;
  clicked: ClickItem[];
  retried: boolean;
}

const SKELETON = `
  <header class="top">
    <h1>edge search</h1>
    <span id="mode-badge" class="badge"></span>
  </header>
  <form id="search-form">
    <input id="search-input" type="search" placeholder="Search the corpus" autocomplete="off" />
    <button type="submit">Search</button>
  </form>
  <div id="notice" hidden>
    <span id="notice-text"></span>
    <button id="notice-retry" type="button" hidden>Retry</button>
    <button id="notice-dismiss" type="button">Dismiss</button>
  </div>
  <section id="interest-widget">
    <span class="label">interest:</span>
    <span id="interest-value">none yet</span>
  </section>
  <main class="columns">
    <ol id="results"></ol>
    <aside id="trace-panel" hidden>
      <h2>why these results</h2>
      <div id="trace-terms"></div>
      <dl>
        <dt>context</dt><dd id="trace-context"></dd>
        <dt>name entities</dt><dd id="trace-entities"></dd>
        <dt>threshold</dt><dd id="trace-mu"></dd>
        <dt>interest used</dt><dd id="trace-theta"></dd>
      </dl>
    </aside>
  </main>
  <div id="doc-view" hidden>
    <button id="doc-back" type="button">&larr; back to results</button>
    <h2 id="doc-title"></h2>
    <pre id="doc-body"></pre>
  </div>
`;

export function initApp(
  root: HTMLElement,
  client: SearchClient,
  opts: AppOptions = {},
): AppController {
  const userId = opts.userId ?? "default";
  const debounceMs = opts.debounceMs ?? 250;
  root.innerHTML = SKELETON;

  const doc = root.ownerDocument;
  const byId = <T extends HTMLElement>(id: string) =>
    root.querySelector<T>(`#${id}`) as T;

  const form = byId<HTMLFormElement>("search-form");
  const input = byId<HTMLInputElement>("search-input");
  const resultsEl = byId<HTMLOListElement>("results");
  const tracePanel = byId<HTMLElement>("trace-panel");
  const notice = byId<HTMLElement>("notice");
  const noticeText = byId<HTMLElement>("notice-text");
  const noticeRetry = byId<HTMLButtonElement>("notice-retry");
  const noticeDismiss = byId<HTMLButtonElement>("notice-dismiss");
  const docView = byId<HTMLElement>("doc-view");
  const interestValue = byId<HTMLElement>("interest-value");
  const modeBadge = byId<HTMLElement>("mode-badge");

  let mode: "PLAIN" | "ENCRYPTED" = "PLAIN";
  let last: SearchResponse | null = null;
  let openClick: { docId: string; queryId: string; timer: DwellTimer } | null = null;
  let queue: QueuedFeedback[] = [];
  let debounceTimer: ReturnType<typeof setTimeout> | null = null;
  let lastQuery = "";

  function showNotice(message: string, retryable: boolean): void {
    noticeText.textContent = message;
    noticeRetry.hidden = !retryable;
    notice.hidden = false;
  }

  noticeDismiss.addEventListener("click", () => {
    notice.hidden = true;
  });
  noticeRetry.addEventListener("click", () => {
    notice.hidden = true;
    void runSearch(lastQuery);
  });

  function setMode(value: "PLAIN" | "ENCRYPTED"): void {
    mode = value;
    modeBadge.textContent = value === "ENCRYPTED" ? "encrypted" : "plain";
    modeBadge.className = `badge ${value.toLowerCase()}`;
  }

  async function refreshInterest(): Promise<void> {
    try {
      const info = await client.interest(userId);
      if (info.interest) {
        interestValue.textContent =
          `${info.interest.label} (${info.interest.source.toLowerCase()}, ` +
          `${info.history.length} sessions)`;
      } else {
        interestValue.textContent = "none yet";
      }
    } catch {
      interestValue.textContent = "unavailable";
    }
  }

  function renderTrace(response: SearchResponse): void {
    const terms = byId<HTMLElement>("trace-terms");
    terms.innerHTML = "";
    for (const term of response.trace.terms) {
      const chip = doc.createElement("span");
      chip.className = `term ${term.provenance.toLowerCase()}`;
      const weight = term.weight === null ? "" : ` ${term.weight.toFixed(2)}`;
      chip.textContent = `${term.term}${weight}`;
      chip.title = `${term.provenance}${term.parent ? ` via ${term.parent}` : ""}`;
      terms.appendChild(chip);
    }
    byId("trace-context").textContent = response.trace.context.join(", ") || "none";
    byId("trace-entities").textContent =
      response.trace.name_entities.join(", ") || "none";
    byId("trace-mu").textContent =
      response.trace.mu === null ? "n/a" : response.trace.mu.toFixed(4);
    byId("trace-theta").textContent = response.trace.theta
      ? `${response.trace.theta.label} (${response.trace.theta.source.toLowerCase()})`
      : "none";
    tracePanel.hidden = false;
  }

  function renderResults(response: SearchResponse): void {
    resultsEl.innerHTML = "";
    for (const result of response.results) {
      const item = doc.createElement("li");
      const link = doc.createElement("button");
      link.type = "button";
      link.className = "result-link";
      link.dataset.docId = result.doc_id;
      link.textContent = result.title;
      link.addEventListener("click", () => void openDoc(result.doc_id));
      const score = doc.createElement("span");
      score.className = "score";
      score.textContent = result.score.toFixed(4);
      const snippet = doc.createElement("p");
      snippet.className = "snippet";
      snippet.textContent =
        result.snippet ?? (mode === "ENCRYPTED" ? "[encrypted]" : "");
      item.append(link, score, snippet);
      resultsEl.appendChild(item);
    }
    if (response.results.length === 0) {
      const empty = doc.createElement("li");
      empty.className = "empty";
      empty.textContent = "no results";
      resultsEl.appendChild(empty);
    }
  }

  async function runSearch(query: string): Promise<void> {
    if (!query.trim()) return;
    lastQuery = query;
    await closeDoc(); // navigating away from an open document
    try {
      const response = await client.search(userId, query);
      last = response;
      renderResults(response);
      renderTrace(response);
    } catch (error) {
      if (error instanceof ApiError) {
        showNotice(`search failed: ${error.message}`, false);
      } else {
        showNotice("network problem while searching", true);
      }
    }
  }

  async function postFeedback(entry: QueuedFeedback): Promise<void> {
    try {
      await client.feedback(userId, entry.queryId, entry.clicked);
      await refreshInterest();
    } catch {
      if (!entry.retried) {
        queue.push({ ...entry, retried: true });
      } else {
        showNotice("feedback could not be delivered", false);
      }
    }
  }

  async function flushFeedbackQueue(): Promise<void> {
    const pending = queue;
    queue = [];
    for (const entry of pending) {
      await postFeedback(entry);
    }
  }

  async function openDoc(docId: string): Promise<void> {
    if (!last) return;
    await closeDoc();
    try {
      const body = await client.doc(docId);
      byId("doc-title").textContent = body.title;
      byId("doc-body").textContent = body.body;
      docView.hidden = false;
      const timer = new DwellTimer(opts.clock);
      timer.start();
      openClick = { docId, queryId: last.query_id, timer };
    } catch (error) {
      const message =
        error instanceof ApiError ? error.message : "could not load the document";
      showNotice(message, false);
    }
  }

  async function closeDoc(): Promise<void> {
    if (!openClick) return;
    const { docId, queryId, timer } = openClick;
    openClick = null;
    docView.hidden = true;
    const dwell = timer.stop();
    await flushFeedbackQueue();
    await postFeedback({
      queryId,
      clicked: [{ doc_id: docId, dwell_seconds: dwell }],
      retried: false,
    });
  }

  byId<HTMLButtonElement>("doc-back").addEventListener("click", () => void closeDoc());

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (debounceTimer) clearTimeout(debounceTimer);
    debounceTimer = setTimeout(() => {
      void runSearch(input.value);
    }, debounceMs);
  });

  void client
    .health()
    .then((health) => setMode(health.mode))
    .catch(() => showNotice("service unreachable", true));
  void refreshInterest();

  return {
    search: runSearch,
    openDoc,
    closeDoc,
    flushFeedbackQueue,
    lastResponse: () => last,
    renderedDocIds: () =>
      Array.from(resultsEl.querySelectorAll<HTMLButtonElement>(".result-link")).map(
        (el) => el.dataset.docId as string,
      ),
    pendingFeedbackCount: () => queue.length,
  };
}
