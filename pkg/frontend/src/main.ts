import './style.css';

import { ApiClient } from './api';
import { renderErrorBanner, renderGallery } from './gallery';
import { pushStateToUrl, readStateFromUrl } from './state';
import { Workbench } from './workbench';

const api = new ApiClient();

async function boot(): Promise<void> {
  const galleryRoot = document.querySelector<HTMLElement>('#gallery')!;
  const workbenchRoot = document.querySelector<HTMLElement>('#workbench')!;
  const state = readStateFromUrl();

  let contexts;
  let profiles;
  try {
    [contexts, profiles] = await Promise.all([api.listContexts(), api.listProfiles()]);
  } catch (error) {
    renderErrorBanner(galleryRoot, `service unreachable: ${String(error)}`, () => void boot());
    return;
  }

  const select = (contextId: string) => {
    state.contextId = contextId;
    pushStateToUrl(state);
    renderGallery(galleryRoot, contexts!, select, contextId);
    workbenchRoot.dataset.context = contextId;
    new Workbench(workbenchRoot, { api, state, contexts: contexts!, profiles: profiles! });
  };

  renderGallery(galleryRoot, contexts, select, state.contextId);
  if (state.contextId && contexts.some((c) => c.id === state.contextId)) {
    select(state.contextId);
  }
}

void boot();
