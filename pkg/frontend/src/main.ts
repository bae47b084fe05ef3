import { AnnotationApp } from './app.js';
import { choiceForKey } from './keyboard.js';

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (el === null) {
    throw new Error(`missing element #${id}`);
  }
  return el as T;
}

const app = new AnnotationApp({
  program: byId('program'),
  query: byId('query'),
  left: byId('left-transcript'),
  right: byId('right-transcript'),
  progress: byId('progress'),
  banner: byId('banner'),
  buttons: {
    left: byId<HTMLButtonElement>('choose-left'),
    right: byId<HTMLButtonElement>('choose-right'),
    tie: byId<HTMLButtonElement>('choose-tie')
  },
  retry: byId<HTMLButtonElement>('retry')
});

byId<HTMLButtonElement>('choose-left').addEventListener('click', () => void app.submit('left'));
byId<HTMLButtonElement>('choose-right').addEventListener('click', () => void app.submit('right'));
byId<HTMLButtonElement>('choose-tie').addEventListener('click', () => void app.submit('tie'));
byId<HTMLButtonElement>('retry').addEventListener('click', () => void app.loadNext());

document.addEventListener('keydown', (event) => {
  const choice = choiceForKey(event.key);
  if (choice !== null) {
    event.preventDefault();
    void app.submit(choice);
  }
});

void app.start();
