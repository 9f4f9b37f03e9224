/** Context gallery: one card per clip with location/mobility/lux badges. */

import type { ContextInfo } from './api';

export function renderGallery(
  root: HTMLElement,
  contexts: ContextInfo[],
  onSelect: (contextId: string) => void,
  selectedId: string | null = null,
): void {
  root.replaceChildren();
  if (contexts.length === 0) {
    const empty = document.createElement('p');
    empty.className = 'empty-state';
    empty.textContent = 'No context clips in the library yet. Add clips under assets/contexts/ and restart the service.';
    root.appendChild(empty);
    return;
  }
  for (const context of contexts) {
    const card = document.createElement('button');
    card.type = 'button';
    card.className = 'context-card' + (context.id === selectedId ? ' selected' : '');
    card.dataset.contextId = context.id;

    const thumb = document.createElement('img');
    thumb.src = context.thumbnail;
    thumb.alt = `first frame of ${context.id}`;
    thumb.loading = 'lazy';
    card.appendChild(thumb);

    const title = document.createElement('strong');
    title.textContent = context.id;
    card.appendChild(title);

    const badges = document.createElement('span');
    badges.className = 'badges';
    for (const text of [
      context.location,
      context.mobility,
      `${context.lighting_lux} lux`,
      `${context.frames} frames`,
    ]) {
      const badge = document.createElement('em');
      badge.className = 'badge';
      badge.textContent = text;
      badges.appendChild(badge);
    }
    card.appendChild(badges);

    card.addEventListener('click', () => onSelect(context.id));
    root.appendChild(card);
  }
}

export function renderErrorBanner(root: HTMLElement, message: string, onRetry: () => void): void {
  root.replaceChildren();
  const banner = document.createElement('div');
  banner.className = 'error-banner';
  const text = document.createElement('span');
  text.textContent = message;
  banner.appendChild(text);
  const retry = document.createElement('button');
  retry.type = 'button';
  retry.textContent = 'Retry';
  retry.addEventListener('click', onRetry);
  banner.appendChild(retry);
  root.appendChild(banner);
}
