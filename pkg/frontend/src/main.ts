// App shell: start/resume a session and drive the per-image two-stage flow.
// The server is the source of truth; every screen renders from a fresh
// session view, so a reload resumes exactly where the observer left off.

import { ApiClient, ApiError, SessionView } from './api.js';
import { completionScreen, stage1Screen, stage2Screen } from './screens.js';

const SESSION_KEY = 'graymode-session';

export class App {
  private cleanup: (() => void) | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly root: HTMLElement,
    private readonly storage: Storage,
  ) {}

  async start(): Promise<void> {
    const existing = this.storage.getItem(SESSION_KEY);
    if (existing) {
      try {
        await this.showCurrent(await this.api.getSession(existing));
        return;
      } catch {
        this.storage.removeItem(SESSION_KEY); // stale session id
      }
    }
    this.showStartForm();
  }

  private setScreen(element: HTMLElement, cleanup?: () => void): void {
    this.cleanup?.();
    this.cleanup = cleanup ?? null;
    this.root.replaceChildren(element);
  }

  private showStartForm(): void {
    const form = document.createElement('form');
    form.className = 'screen start';
    form.innerHTML = `
      <h2>Start an evaluation session</h2>
      <label>Observer id <input name="observer" required></label>
      <label>Image set <input name="set" required></label>
      <button type="submit">Begin</button>
      <p class="error" hidden></p>
    `;
    form.addEventListener('submit', async (event) => {
      event.preventDefault();
      const observer = (form.elements.namedItem('observer') as HTMLInputElement).value.trim();
      const set = (form.elements.namedItem('set') as HTMLInputElement).value.trim();
      try {
        const view = await this.api.createSession(observer, set);
        this.storage.setItem(SESSION_KEY, view.session_id);
        await this.showCurrent(view);
      } catch (err) {
        this.showError(form, err);
      }
    });
    this.setScreen(form);
  }

  private showError(container: HTMLElement, err: unknown): void {
    const box = container.querySelector('.error') as HTMLElement | null;
    if (box) {
      box.hidden = false;
      box.textContent = err instanceof Error ? err.message : String(err);
    }
  }

  async showCurrent(view: SessionView): Promise<void> {
    if (view.done || view.current_image === null) {
      this.storage.removeItem(SESSION_KEY);
      this.setScreen(completionScreen(view));
      return;
    }
    const imageId = view.current_image;
    try {
      if (view.stage === 'stage1') {
        await this.showStage1(view, imageId);
      } else {
        await this.showStage2(view, imageId);
      }
    } catch (err) {
      if (err instanceof ApiError && err.isConflict) {
        // stage moved underneath us; re-sync with the server
        await this.refresh(view.session_id);
        return;
      }
      this.showRetry(view.session_id, err);
    }
  }

  private async refresh(sessionId: string): Promise<void> {
    try {
      await this.showCurrent(await this.api.getSession(sessionId));
    } catch (err) {
      this.showRetry(sessionId, err);
    }
  }

  private async showStage1(view: SessionView, imageId: string): Promise<void> {
    const manifest = await this.api.stage1(view.session_id, imageId);
    const screen = stage1Screen(
      view,
      manifest,
      (p) => this.api.assetUrl(p),
      async (picks) => {
        try {
          await this.api.submitStage1(view.session_id, imageId, picks);
        } catch (err) {
          if (!(err instanceof ApiError && err.isConflict)) {
            this.showRetry(view.session_id, err);
            return;
          }
        }
        await this.refresh(view.session_id);
      },
    );
    this.setScreen(screen.element, screen.unbind);
  }

  private async showStage2(view: SessionView, imageId: string): Promise<void> {
    const manifest = await this.api.stage2(view.session_id, imageId);
    const screen = stage2Screen(
      view,
      manifest,
      (p) => this.api.assetUrl(p),
      async (pick) => {
        try {
          await this.api.submitFinal(view.session_id, imageId, pick);
        } catch (err) {
          if (!(err instanceof ApiError && err.isConflict)) {
            this.showRetry(view.session_id, err);
            return;
          }
        }
        await this.refresh(view.session_id);
      },
    );
    this.setScreen(screen.element, screen.unbind);
  }

  private showRetry(sessionId: string, err: unknown): void {
    const box = document.createElement('section');
    box.className = 'screen failure';
    const note = document.createElement('p');
    note.textContent = `Request failed: ${err instanceof Error ? err.message : String(err)}`;
    const retry = document.createElement('button');
    retry.textContent = 'Retry';
    retry.addEventListener('click', () => void this.refresh(sessionId));
    box.append(note, retry);
    this.setScreen(box);
  }
}

export function bootstrap(): void {
  const root = document.getElementById('app');
  if (!root) throw new Error('missing #app root');
  const app = new App(new ApiClient(), root, window.localStorage);
  void app.start();
}

// auto-start in the browser; tests construct App themselves
if (typeof document !== 'undefined' && document.getElementById('app')) {
  bootstrap();
}
