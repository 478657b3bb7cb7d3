const { Firestore } = require('@google-cloud/firestore');

const db = new Firestore();

exports.handler = async (event) => {
  const doc = db.collection('profiles').doc('default');
  await doc.set({ theme: event.theme });
  const snapshot = await doc.get();
  return snapshot.data();
};
