import { AnnotationApp } from './app.js';
import { choiceForKey } from './keyboard.js';
function byId(id) {
    const el = document.getElementById(id);
    if (el === null) {
        throw new Error(`missing element #${id}`);
    }
    return el;
}
const app = new AnnotationApp({
    program: byId('program'),
    query: byId('query'),
    left: byId('left-transcript'),
    right: byId('right-transcript'),
    progress: byId('progress'),
    banner: byId('banner'),
    buttons: {
        left: byId('choose-left'),
        right: byId('choose-right'),
        tie: byId('choose-tie')
    },
    retry: byId('retry')
});
byId('choose-left').addEventListener('click', () => void app.submit('left'));
byId('choose-right').addEventListener('click', () => void app.submit('right'));
byId('choose-tie').addEventListener('click', () => void app.submit('tie'));
byId('retry').addEventListener('click', () => void app.loadNext());
document.addEventListener('keydown', (event) => {
    const choice = choiceForKey(event.key);
    if (choice !== null) {
        event.preventDefault();
        void app.submit(choice);
    }
});
void app.start();
