// Screen builders for the two protocol stages. All DOM, no framework; the
// caller wires the submit callbacks to the API client.

import { Stage1Manifest, Stage2Manifest, SessionView } from './api.js';
import { MosaicGrid } from './mosaic.js';

export const STAGE1_PICKS = 4;

export interface Stage1Screen {
  element: HTMLElement;
  mosaic: MosaicGrid;
  submitButton: HTMLButtonElement;
  unbind: () => void;
}

export interface Stage2Screen {
  element: HTMLElement;
  mosaic: MosaicGrid;
  confirmButton: HTMLButtonElement;
  enlarge: (token: string) => void;
  unbind: () => void;
}

function progressLine(view: SessionView): string {
  const done = view.images.filter(
    (img) => view.current_image === null || view.images.indexOf(img) < view.images.indexOf(view.current_image),
  ).length;
  return `image ${Math.min(done + 1, view.images.length)} of ${view.images.length}`;
}

export function stage1Screen(
  view: SessionView,
  manifest: Stage1Manifest,
  assetUrl: (path: string) => string,
  onSubmit: (picks: string[]) => void,
): Stage1Screen {
  const element = document.createElement('section');
  element.className = 'screen stage1';

  const header = document.createElement('header');
  const title = document.createElement('h2');
  title.textContent = `Pick the ${STAGE1_PICKS} best grayscale versions`;
  const progress = document.createElement('p');
  progress.className = 'progress';
  progress.textContent = progressLine(view);
  header.append(title, progress);

  // the color original sits in a corner of the screen for reference
  const reference = document.createElement('figure');
  reference.className = 'reference-corner';
  const refImg = document.createElement('img');
  refImg.src = assetUrl(manifest.reference_url);
  refImg.alt = 'color original';
  const refCaption = document.createElement('figcaption');
  refCaption.textContent = 'original';
  reference.append(refImg, refCaption);

  const submitButton = document.createElement('button');
  submitButton.className = 'submit';
  submitButton.textContent = `Continue with ${STAGE1_PICKS} picks`;
  submitButton.disabled = true;

  const mosaic = new MosaicGrid(
    manifest.slots.map((slot) => ({
      token: slot.token,
      url: assetUrl(slot.url),
      blank: slot.blank,
    })),
    {
      cols: manifest.cols,
      maxPicks: STAGE1_PICKS,
      onChange: (selected) => {
        submitButton.disabled = selected.length !== STAGE1_PICKS;
      },
    },
  );

  submitButton.addEventListener('click', () => {
    const picks = mosaic.selectedTokens();
    if (picks.length === STAGE1_PICKS) onSubmit(picks);
  });

  const unbind = mosaic.bindKeys(element.ownerDocument);
  element.append(header, reference, mosaic.element, submitButton);
  return { element, mosaic, submitButton, unbind };
}

export function stage2Screen(
  view: SessionView,
  manifest: Stage2Manifest,
  assetUrl: (path: string) => string,
  onConfirm: (pick: string) => void,
): Stage2Screen {
  const element = document.createElement('section');
  element.className = 'screen stage2';

  const header = document.createElement('header');
  const title = document.createElement('h2');
  title.textContent = 'Pick the single best version';
  const hint = document.createElement('p');
  hint.className = 'progress';
  hint.textContent = `${progressLine(view)} — use the magnifier to inspect at full size`;
  header.append(title, hint);

  const confirmButton = document.createElement('button');
  confirmButton.className = 'submit';
  confirmButton.textContent = 'Confirm choice';
  confirmButton.disabled = true;

  const mosaic = new MosaicGrid(
    manifest.candidates.map((c) => ({ token: c.token, url: assetUrl(c.url) })),
    {
      cols: 2,
      maxPicks: 1,
      keyMap: '1234',
      onChange: (selected) => {
        confirmButton.disabled = selected.length !== 1;
      },
    },
  );

  // click-to-enlarge overlay at native resolution; dismissing it leaves the
  // selection untouched
  const enlarge = (token: string): void => {
    const candidate = manifest.candidates.find((c) => c.token === token);
    if (!candidate) return;
    const overlay = document.createElement('div');
    overlay.className = 'enlarge-overlay';
    const img = document.createElement('img');
    img.src = assetUrl(candidate.url);
    img.alt = 'enlarged candidate';
    overlay.appendChild(img);
    const dismiss = () => {
      overlay.remove();
      element.ownerDocument.removeEventListener('keydown', onKey);
    };
    const onKey = (event: KeyboardEvent) => {
      if (event.key === 'Escape') dismiss();
    };
    overlay.addEventListener('click', dismiss);
    element.ownerDocument.addEventListener('keydown', onKey);
    element.appendChild(overlay);
  };

  // one magnifier button per candidate, outside the selectable tile
  const magnifiers = document.createElement('div');
  magnifiers.className = 'magnifier-row';
  manifest.candidates.forEach((candidate, index) => {
    const btn = document.createElement('button');
    btn.className = 'magnifier';
    btn.textContent = `inspect ${index + 1}`;
    btn.addEventListener('click', () => enlarge(candidate.token));
    magnifiers.appendChild(btn);
  });

  confirmButton.addEventListener('click', () => {
    const picks = mosaic.selectedTokens();
    if (picks.length === 1) onConfirm(picks[0]);
  });

  const unbind = mosaic.bindKeys(element.ownerDocument);
  element.append(header, mosaic.element, magnifiers, confirmButton);
  return { element, mosaic, confirmButton, enlarge, unbind };
}

export function completionScreen(view: SessionView): HTMLElement {
  const element = document.createElement('section');
  element.className = 'screen done';
  const title = document.createElement('h2');
  title.textContent = 'All images evaluated';
  const note = document.createElement('p');
  note.textContent = `Thank you — ${view.images.length} images completed. You can close this window.`;
  element.append(title, note);
  return element;
}
